import math

import mpmath
import pytest
import sympy

from ktuple import singular
from ktuple.errors import ContractError
from ktuple.tuples import KTuple


def test_twin_constant():
    s = singular.singular_series(KTuple((0, 2)))
    assert abs(s.value - mpmath.mpf("1.3203236316")) < 1e-9
    assert s.tail_bound < 1e-15


def test_twin_constant_from_reference_digits():
    # 2 * C_2 with C_2 = 0.66016181584686957392...
    s = singular.singular_series(KTuple((0, 2)), precision=1e-18)
    assert abs(s.value - 2 * mpmath.mpf("0.66016181584686957392")) < 1e-17


@pytest.mark.parametrize("offs", [(0, 2), (0, 2, 6), (0, 4, 6), (0, 2, 6, 8), (0, 2, 6, 8, 12), (0, 6)])
def test_two_routes_agree(offs):
    t = KTuple(offs)
    fast = float(singular.singular_series(t).value)
    crude, bound = singular.singular_series_crude(t, 10**6)
    assert abs(fast - crude) <= bound + 1e-12


def test_shift_ratio_exact():
    a = singular.singular_series(KTuple((0, 10))).value
    b = singular.singular_series(KTuple((0, 2))).value
    assert abs(a / b - mpmath.mpf(4) / 3) < 1e-14
    assert singular.twin_shift_factor(10) == pytest.approx(4 / 3)
    assert singular.twin_shift_factor(30) == pytest.approx(4 / 3 * 2)


def test_inadmissible_is_zero():
    s = singular.singular_series(KTuple((0, 2, 4)))
    assert s.value == 0 and s.obstructions == (3,)


def test_translation_invariance():
    a = singular.singular_series(KTuple((0, 2, 6))).value
    b = singular.singular_series(KTuple((5, 7, 11))).value
    assert a == b


def test_kappa_is_reciprocal():
    t = KTuple((0, 2, 6))
    C = float(singular.singular_series(t).value)
    for which in ("omega", "omega_star"):
        kap = singular.selberg_delange_kappa(t, which, 10**6)
        assert kap * C == pytest.approx(1.0, rel=1e-4)
    with pytest.raises(ContractError):
        singular.selberg_delange_kappa(t, "other")


def test_ramanujan_sum():
    for m in range(1, 40):
        for k in range(0, 40):
            d = singular.ramanujan_sum_direct(m, k)
            assert abs(d - singular.ramanujan_sum(m, k)) < 1e-9


def test_circle_method_small():
    a = singular.circle_method_constant(2, 10**5)
    assert a == pytest.approx(1.3203236316, abs=1e-4)
    with pytest.raises(ContractError):
        singular.circle_method_constant(3, 100)


def test_twin_count_against_sympy(table):
    x = 10**5
    ref = sum(1 for p in sympy.primerange(2, x - 1) if sympy.isprime(p + 2))
    assert singular.count_tuplets(KTuple((0, 2)), x, table) == ref == 1224


def test_triplet_count_against_brute(table):
    x = 20_000
    t = KTuple((0, 2, 6))
    ref = sum(1 for n in range(1, x - 5) if all(sympy.isprime(n + a) for a in t.offsets))
    assert singular.count_tuplets(t, x, table) == ref


def test_prediction_ratio(table):
    p = singular.predict_and_count(KTuple((0, 2)), 10**6, table)
    assert p.actual == 8169
    assert 0.95 < p.ratio < 1.05


def test_log_power_integral():
    # li(x) - li(2) for k = 1
    x = 10**6
    ref = float(mpmath.li(x) - mpmath.li(2))
    assert singular.log_power_integral(x, 1) == pytest.approx(ref, rel=1e-10)
    ref2 = float(mpmath.quad(lambda t: 1 / mpmath.log(t) ** 3, [2, 100, 10**4, x]))
    assert singular.log_power_integral(x, 3) == pytest.approx(ref2, rel=1e-9)
    assert math.isfinite(singular.log_power_integral(1e12, 5))
