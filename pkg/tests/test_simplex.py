import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ktuple import simplex
from ktuple.errors import ContractError
from ktuple.simplex import SimplexMonomial, SymmetricPoly


def sympy_simplex_integral(expr, xs):
    """Iterated exact integral over t_i >= 0, sum t_i <= 1."""
    out = expr
    k = len(xs)
    for i in reversed(range(k)):
        upper = 1 - sum(xs[:i])
        out = sympy.integrate(out, (xs[i], 0, upper))
    return sympy.Rational(out)


def test_dirichlet_integral_against_sympy():
    xs = sympy.symbols("t1:4")
    for exps in [(0, 0, 0), (1, 0, 0), (2, 1, 0), (3, 2, 1), (0, 4, 2)]:
        expr = sympy.Mul(*[x**e for x, e in zip(xs, exps)])
        ours = simplex.simplex_integrate(SimplexMonomial(exps), 3)
        assert ours == Fraction(str(sympy_simplex_integral(expr, xs)))


def test_simplex_volume():
    assert simplex.simplex_integrate(SimplexMonomial(()), 5) == Fraction(1, 120)


def test_monte_carlo_agrees():
    rng = np.random.default_rng(3)
    k = 4
    # uniform on the simplex: Dirichlet(1,...,1) with a slack coordinate
    pts = rng.dirichlet(np.ones(k + 1), size=400_000)[:, :k]
    vol = 1 / math.factorial(k)
    for exps in [(1, 0, 0, 0), (2, 1, 0, 0), (1, 1, 1, 1)]:
        mc = vol * np.mean(np.prod(pts ** np.array(exps), axis=1))
        exact = float(simplex.simplex_integrate(SimplexMonomial(exps), k))
        assert mc == pytest.approx(exact, rel=0.02)


@pytest.mark.parametrize("k", [2, 3])
def test_power_sum_integral_against_sympy(k):
    xs = sympy.symbols(f"t1:{k + 1}")
    p1 = sum(xs)
    p2 = sum(x**2 for x in xs)
    for A in range(3):
        for B in range(3):
            ref = sympy_simplex_integral(sympy.expand((1 - p1) ** A * p2**B), xs)
            assert simplex.power_sum_integral(k, A, B) == Fraction(str(ref))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 8), st.integers(0, 4))
def test_closed_form_equals_orbit_expansion(k, A, B):
    assert simplex.power_sum_integral(k, A, B) == simplex.power_sum_integral_expanded(k, A, B)


def test_large_k_routes():
    assert simplex.power_sum_integral(104, 24, 0) == simplex.power_sum_integral_expanded(104, 24, 0)
    assert simplex.power_sum_integral(104, 2, 11) == simplex.power_sum_integral_expanded(104, 2, 11)


def test_partitions_and_orbits():
    assert sorted(simplex.partitions(4)) == sorted([(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)])
    assert list(simplex.partitions(4, max_len=2)) and all(len(p) <= 2 for p in simplex.partitions(4, max_len=2))
    assert simplex.orbit_size((2, 1), 3) == 6
    assert simplex.orbit_size((1, 1), 3) == 3


def test_basis_pairs():
    b = simplex.basis_pairs(11)
    assert len(b) == 42
    assert all(a + 2 * c <= 11 for a, c in b)
    assert simplex.basis_pairs(2) == [(0, 0), (1, 0), (2, 0), (0, 1)]


def test_symmetric_poly_parse_and_evaluate():
    F = SymmetricPoly.parse([70, -49, -75, 83, -34], ["P1P2", "P1^2", "P2", "P1", "1"])
    t = [0.1, 0.05, 0.2, 0.0, 0.3]
    p1, p2 = sum(t), sum(x * x for x in t)
    direct = 70 * p1 * p2 - 49 * p1**2 - 75 * p2 + 83 * p1 - 34
    assert F.evaluate(t) == pytest.approx(direct)
    assert F.degree_cap == 3
    with pytest.raises(ContractError):
        F.vector([(0, 0)])


def test_monomial_parser():
    assert simplex.parse_power_sum_monomial("P1^2P2") == (2, 1)
    assert simplex.parse_power_sum_monomial("1") == (0, 0)
    assert simplex.parse_power_sum_monomial("P2^3") == (0, 3)
