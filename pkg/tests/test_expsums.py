import cmath
import math
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ktuple import expsums
from ktuple.errors import ContractError
from ktuple.expsums import ExpSumSpec


def brute(spec, lo=0, hi=None):
    """Term-by-term oracle for squarefree q: per-prime inverses glued with sympy's CRT."""
    q = spec.q
    hi = q - 1 if hi is None else hi
    ps = list(sympy.factorint(q)) if q > 1 else []
    total = 0j
    count = 0
    for n in range(lo, hi + 1):
        if any((spec.a % p and n % p == 0) or (spec.b % p and (n + spec.delta) % p == 0) for p in ps):
            continue

        def inv(m):
            if not ps:
                return 0
            res = [pow(m, -1, p) if m % p else 0 for p in ps]
            return int(sympy.ntheory.modular.crt(ps, res)[0])

        f = (spec.a * inv(n) + spec.b * inv(n + spec.delta) + spec.c * n) % q
        total += cmath.exp(2j * math.pi * f / q)
        count += 1
    return total, count


def test_examples():
    s = expsums.complete_sum_prime(ExpSumSpec(7, 0, 0, 1, 1))
    assert abs(s.value) < 1e-12
    k = expsums.complete_sum_prime(ExpSumSpec(7, 1, 0, 1, 1))  # Kloosterman K(1,1;7)
    assert abs(k.value) <= 2 * math.sqrt(7)
    d = expsums.complete_sum_prime(ExpSumSpec(7, 0, 0, 1, 0))
    assert d.value == pytest.approx(7)


def test_kloosterman_weil_bound():
    for p in (5, 7, 11, 13, 101):
        for a in range(1, p):
            s = expsums.complete_sum_prime(ExpSumSpec(p, a, 0, 1, 1))
            assert abs(s.value) <= 2 * math.sqrt(p) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([q for q in range(2, 300) if sympy.factorint(q) and max(sympy.factorint(q).values()) == 1]), st.data())
def test_crt_direct_brute(q, data):
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    delta = data.draw(st.integers(0, q - 1))
    spec = ExpSumSpec(q, a, b, delta, c)
    ref, cnt = brute(spec)
    crt = expsums.complete_sum_crt(spec)
    assert abs(crt.value - ref) < 1e-9 and crt.count == cnt
    assert abs(expsums.complete_sum_direct(spec).value - ref) < 1e-9


def test_crt_rejects_non_squarefree():
    with pytest.raises(ContractError):
        expsums.complete_sum_crt(ExpSumSpec(12, 1, 1, 1, 1))


def test_conjugate_symmetry():
    spec = ExpSumSpec(30, 7, 11, 4, 13)
    s = expsums.complete_sum_direct(spec).value
    t = expsums.complete_sum_direct(spec.negated()).value
    assert abs(s - t.conjugate()) < 1e-10


def test_carmichael():
    for q in range(1, 300):
        assert expsums.carmichael(q) == sympy.reduced_totient(q)


def test_inverse_table():
    inv = expsums.inverse_table(101)
    assert all(n * int(inv[n]) % 101 == 1 for n in range(1, 101))
    assert not inv.flags.writeable


def test_plancherel_random():
    rng = random.Random(11)
    for _ in range(200):
        q = rng.randrange(2, 400)
        M = rng.randrange(1, q + 1)
        n1 = rng.randrange(-q, q)
        spec = ExpSumSpec(q, rng.randrange(q), rng.randrange(q), rng.randrange(q), rng.randrange(q), (n1, n1 + M - 1))
        s, dec = expsums.incomplete_via_plancherel(spec)
        assert dec.relative_gap < 1e-9
        assert dec.max_transform_ratio <= 1 + 1e-9
        if q < 60 and sympy.factorint(q) and max(sympy.factorint(q).values()) == 1:
            ref, _ = brute(spec, n1, n1 + M - 1)
            assert abs(s.value - ref) < 1e-9


def test_plancherel_length_contract():
    with pytest.raises(ContractError):
        expsums.incomplete_via_plancherel(ExpSumSpec(7, 1, 1, 1, 1, (0, 10)))


def test_interval_transform():
    q, n1, n2 = 17, 3, 9
    I = expsums.interval_transform(q, n1, n2)
    for h in range(q):
        ref = sum(cmath.exp(2j * math.pi * h * n / q) for n in range(n1, n2 + 1))
        assert abs(I[h] - ref) < 1e-10


def test_split_modulus():
    assert expsums.split_modulus(255255, 17) == (143, 1785)
    for q in (30030, 510510, 9699690):
        q1, q2 = expsums.split_modulus(q, 19)
        assert q1 * q2 == q and q1**3 <= q * 19


def test_graham_ringrose_paths():
    q = 255255
    q1, q2 = expsums.split_modulus(q, 17)
    g = expsums.graham_ringrose_bound(ExpSumSpec(q, 1, 2, 3, 4, (0, q1 - 1)), q1, q2)
    assert g.path == "trivial" and g.actual <= g.bound
    g = expsums.graham_ringrose_bound(ExpSumSpec(q, 1, 2, 3, 4, (0, 999)), q1, q2)
    assert g.path == "split"
    g = expsums.graham_ringrose_bound(ExpSumSpec(q, 1, 2, 3, 4, (0, 2000)), q1, q2)
    assert g.path == "complete"
    with pytest.raises(ContractError):
        expsums.graham_ringrose_bound(ExpSumSpec(q, 1, 2, 3, 4, (0, 10)), q1, q2 + 1)


def test_weil_sweep_deterministic():
    a = expsums.weil_sweep(500, seed=4)
    b = expsums.weil_sweep(500, seed=4)
    assert a.kappa_obs == b.kappa_obs and a.worst == b.worst
    assert 0 < a.kappa_obs < 10
