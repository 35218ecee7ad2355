import math
from fractions import Fraction

import pytest
import sympy

from ktuple import gpy, maynard
from ktuple.errors import ContractError
from ktuple.simplex import SymmetricPoly, basis_pairs


def sympy_forms(k, basis):
    """M1, M2 by iterated symbolic integration (oracle for small k)."""
    xs = sympy.symbols(f"t1:{k + 1}")
    p1, p2 = sum(xs), sum(x**2 for x in xs)
    funcs = [(1 - p1) ** a * p2**b for a, b in basis]

    def integrate_simplex(expr, vars_):
        out = expr
        for i in reversed(range(len(vars_))):
            out = sympy.integrate(out, (vars_[i], 0, 1 - sum(vars_[:i])))
        return sympy.Rational(out)

    n = len(basis)
    inner = [sympy.integrate(f, (xs[-1], 0, 1 - sum(xs[:-1]))) for f in funcs]
    M1 = [[integrate_simplex(sympy.expand(funcs[i] * funcs[j]), xs) for j in range(n)] for i in range(n)]
    M2 = [[k * integrate_simplex(sympy.expand(inner[i] * inner[j]), xs[:-1]) for j in range(n)] for i in range(n)]
    return M1, M2


@pytest.mark.parametrize("k", [2, 3])
def test_forms_against_sympy(k):
    basis = basis_pairs(2)
    forms = maynard.build_forms(k, basis=basis)
    M1, M2 = sympy_forms(k, basis)
    for i in range(len(basis)):
        for j in range(len(basis)):
            assert forms.M1[i][j] == Fraction(str(M1[i][j]))
            assert forms.M2[i][j] == Fraction(str(M2[i][j]))


def test_k5_exact():
    F = SymmetricPoly.parse([70, -49, -75, 83, -34], ["P1P2", "P1^2", "P2", "P1", "1"])
    assert maynard.evaluate_rho(F, 5) == Fraction(1417255, 708216)


def test_constant_basis():
    r = maynard.optimize_rho(maynard.build_forms(5, 0))
    assert r.exact_rayleigh == Fraction(5, 3)
    assert r.rho == pytest.approx(5 / 3, rel=1e-15)


@pytest.mark.parametrize("k", [2, 3, 7, 12])
def test_gpy_consistency(k):
    for l in range(0, 5):
        assert maynard.evaluate_rho(SymmetricPoly({(l, 0): 1}), k) == gpy.rho_k_closed_form(k, l)


def test_routes_agree():
    a = maynard.build_forms(5, 3)
    b = maynard.build_forms(5, 3, route="expanded")
    assert a.M1 == b.M1 and a.M2 == b.M2


def test_forms_symmetric_pd():
    f = maynard.build_forms(10, 6)
    assert f.is_symmetric()
    ok, _ = maynard.positive_definite(f.M1)
    assert ok


def test_leading_minors_against_sympy():
    M = [[Fraction(4), Fraction(1), Fraction(1, 2)], [Fraction(1), Fraction(3), Fraction(0)], [Fraction(1, 2), Fraction(0), Fraction(2)]]
    S = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M])
    ours = maynard.leading_minors(M)
    for i in range(3):
        assert ours[i] == Fraction(str(S[: i + 1, : i + 1].det()))
    assert not maynard.positive_definite([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]])[0]


def test_k5_optimum_dominates_reported_polynomial():
    # the reported F lives in the degree-3 span
    r = maynard.optimize_rho(maynard.build_forms(5, 3))
    assert r.rho >= 1417255 / 708216
    assert r.rho <= maynard.tao_upper_bound(5)
    assert r.residual < 1e-20
    assert float(r.exact_rayleigh) == pytest.approx(r.rho, rel=1e-14)


def test_optimum_monotone_in_degree():
    vals = [maynard.optimize_rho(maynard.build_forms(6, d)).rho for d in range(0, 6)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_rayleigh_zero_vector():
    f = maynard.build_forms(4, 1)
    with pytest.raises(ContractError):
        maynard.rayleigh(f, [0, 0])


def test_gate_and_tao():
    g = maynard.rho_gate(4.0020697, 1)
    assert g["unconditional"] and g["elliott_halberstam"]
    assert maynard.tao_upper_bound(105) == pytest.approx(105 * math.log(105) / 104)
    with pytest.raises(ContractError):
        maynard.tao_upper_bound(1)


@pytest.mark.parametrize("k", [10**4, 10**5])
def test_product_bound(k):
    A = maynard.standard_A(k)
    b = maynard.product_construction_bound(k, A)
    assert b.middle >= A - 2
    assert b.first_bound == pytest.approx(b.middle, rel=1e-10)
    assert b.quadrature_error < 1e-12
    assert b.eta == pytest.approx(1 - b.mu / b.gamma)


def test_m_to_k():
    k = maynard.m_to_k(1)
    assert 16000 < k < 17000
    target = math.exp(12)
    assert k * math.log(k) > target >= (k - 1) * math.log(k - 1)


def test_b_m(table):
    r = maynard.b_m(1, table)
    assert all(r.pi_checks)
    assert r.construction_width <= r.interval_end
