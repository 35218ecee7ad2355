import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ktuple.errors import ContractError, OutOfRangeError, ResourceError
from ktuple.primes import (
    PrimeTable,
    estimate_bytes,
    factorize,
    simple_sieve,
    sieve,
    smallest_prime_factors,
    theta,
    theta_progression,
)


def test_simple_sieve_small():
    assert simple_sieve(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert simple_sieve(1).tolist() == []
    assert simple_sieve(2).tolist() == [2]


@pytest.mark.parametrize("x", [10, 100, 1000, 10**4, 10**5, 10**6, 2 * 10**6])
def test_pi_against_sympy(table, x):
    assert table.pi(x) == sympy.primepi(x)


def test_pi_known_values(table):
    assert table.pi(10**6) == 78498
    assert table.pi(2) == 1 and table.pi(1) == 0


def test_segmented_matches_simple(tmp_path):
    ref = simple_sieve(50_000)
    for block in (8, 64, 1000, 7919):
        t = sieve(50_000, block_size=block)
        assert np.array_equal(t.primes, ref)


def test_is_prime_matches_sympy(table):
    rng = np.random.default_rng(5)
    for n in rng.integers(0, 2 * 10**6, 2000).tolist() + [0, 1, 2, 3, 4, 999983]:
        assert table.is_prime(int(n)) == sympy.isprime(int(n))


def test_is_prime_out_of_range(table):
    with pytest.raises(OutOfRangeError):
        table.is_prime(table.limit + 1)


def test_limit_contract():
    with pytest.raises(ContractError):
        sieve(1)


def test_memory_budget():
    assert estimate_bytes(10**9) > 10**7
    with pytest.raises(ResourceError):
        sieve(10**9, memory_budget=10**6)


def test_cache_reuse_and_extend(tmp_path):
    t1 = sieve(10_000, cache_dir=tmp_path)
    assert list(tmp_path.iterdir())
    t2 = sieve(5_000, cache_dir=tmp_path)  # served from the larger table
    assert np.array_equal(t2.primes, t1.primes[t1.primes <= 5000])
    t3 = sieve(40_000, cache_dir=tmp_path)  # extended
    assert np.array_equal(t3.primes, simple_sieve(40_000))


def test_save_load_roundtrip(tmp_path):
    t = sieve(12_345)
    path = t.save(tmp_path / "tab.npz")
    back = PrimeTable.load(path)
    assert back.limit == t.limit and np.array_equal(back.primes, t.primes)


def test_theta_against_direct_sum(table):
    for x in (2, 10, 997, 10**5):
        ref = math.fsum(math.log(p) for p in sympy.primerange(2, x + 1))
        assert theta(table, x) == pytest.approx(ref, rel=1e-15, abs=1e-12)
    assert theta(table, 1) == 0.0


def test_theta_progression_partitions(table):
    x, q = 10**5, 12
    parts = [theta_progression(table, x, q, a) for a in range(q)]
    assert math.fsum(parts) == pytest.approx(theta(table, x), rel=1e-13)
    ref = math.fsum(math.log(p) for p in sympy.primerange(2, x + 1) if p % q == 5)
    assert parts[5] == pytest.approx(ref, rel=1e-13)


def test_theta_out_of_range(table):
    with pytest.raises(OutOfRangeError):
        theta(table, table.limit + 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=10**6))
def test_factorize_property(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(sympy.isprime(p) for p in f)


def test_factorize_with_spf():
    spf = smallest_prime_factors(1000)
    for n in range(2, 1001):
        assert factorize(n, spf) == sympy.factorint(n)
