import math

import pytest
import sympy

from ktuple import progressions
from ktuple.errors import ContractError, OutOfRangeError, ResourceError
from ktuple.primes import theta, theta_progression


def naive_bv(x, Q):
    ps = list(sympy.primerange(2, x + 1))
    total = 0.0
    for q in range(1, Q + 1):
        ph = sympy.totient(q)
        worst = 0.0
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            th = math.fsum(math.log(p) for p in ps if p % q == a)
            worst = max(worst, abs(th - x / ph))
        total += worst
    return total


def test_bv_against_naive(table):
    x, Q = 20_000, 15
    total, scan = progressions.bv_sum(x, Q, table)
    assert total == pytest.approx(naive_bv(x, Q), rel=1e-11)
    assert scan.partition_ok and len(scan.rows) == Q


def test_q1_is_theta_error(table):
    x = 10**6
    total, _ = progressions.bv_sum(x, 1, table)
    assert total == pytest.approx(abs(theta(table, x) - x), rel=1e-12)


def test_buckets_match_theta_progression(table):
    b = progressions.ResidueBuckets(table, 10**5)
    th = b.theta_all(7)
    for a in range(7):
        assert th[a] == pytest.approx(theta_progression(table, 10**5, 7, a), rel=1e-13)


def test_restricted_sum_is_subset(table):
    x, Q = 10**5, 300
    full, _ = progressions.bv_sum(x, Q, table, fixed_a=1)
    part, scan = progressions.bv_sum(x, Q, table, "smooth-squarefree", y=5, fixed_a=1)
    assert part <= full
    assert [r.q for r in scan.rows] == progressions.smooth_squarefree_moduli(Q, 5)[:len(scan.rows)]


def test_filters_and_contracts(table):
    with pytest.raises(ContractError):
        progressions.bv_sum(1000, 0, table)
    with pytest.raises(ContractError):
        progressions.bv_sum(1000, 10, table, "smooth")
    with pytest.raises(ContractError):
        progressions.bv_sum(1000, 10, table, "nope")
    with pytest.raises(OutOfRangeError):
        progressions.bv_sum(table.limit + 1, 2, table)
    with pytest.raises(ResourceError):
        progressions.bv_sum(10**6, 1000, table, work_budget=10**6)
    _, scan = progressions.bv_sum(10**4, 20, table, "coprime-to", fixed_a=3)
    assert all(math.gcd(r.q, 3) == 1 for r in scan.rows)


def test_default_Q():
    assert progressions.bv_default_Q(10**5) == 2
    assert progressions.bv_default_Q(10**6) == 5
    assert progressions.bv_default_Q(10**7) == 12


def test_siegel_walfisz_probe(table):
    assert progressions.siegel_walfisz_probe(10**6, 3, table) < 0.01
    with pytest.raises(ContractError):
        progressions.siegel_walfisz_probe(10**3, 5000, table)


def test_smooth_moduli_and_divisors():
    assert progressions.smooth_squarefree_moduli(100, 5) == [1, 2, 3, 5, 6, 10, 15, 30]
    assert progressions.select_divisor(30030, 100) == 91
    assert progressions.divisors(12) == [1, 2, 3, 4, 6, 12]
    for q in range(1, 200):
        assert progressions.euler_phi(q) == sympy.totient(q)


def test_csv_rows(table):
    _, scan = progressions.bv_sum(10**4, 4, table)
    rows = scan.csv_rows()
    assert [r["q"] for r in rows] == [1, 2, 3, 4]
    assert rows[3]["squarefree"] == 0 and rows[3]["P(q)"] == 2
