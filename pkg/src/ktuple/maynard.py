"""The multidimensional sieve optimization.

For symmetric F on T_k written in the basis (1 - P1)^a P2^b, both

    M1[i][j] = int_{T_k} b_i b_j
    M2[i][j] = k int_{T_{k-1}} (int_0^{1-P1'} b_i dt_k)(int_0^{1-P1'} b_j dt_k)

are exact rationals (P1', P2' are the power sums of t_1..t_{k-1}).  The inner
integral uses P1 = P1' + t, P2 = P2' + t^2 and s = 1 - P1':

    int_0^s (s - t)^a (P2' + t^2)^b dt = sum_j C(b, j) a! (2j)!/(a+2j+1)! s^(a+2j+1) P2'^(b-j).

The simplex is read as t_i >= 0 throughout.  rho(F) = v^T M2 v / v^T M1 v and its
maximum over the span is the top generalized eigenvalue of (M2, M1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from scipy import integrate

from .errors import ContractError, KTupleError, ResourceError
from .primes import PrimeTable
from .simplex import (
    OrbitExpander,
    SymmetricPoly,
    basis_pairs,
    power_sum_integral,
)
from .tuples import primes_in_interval_construction

MAX_BASIS = 400


@dataclass
class QuadFormPair:
    k: int
    basis: list[tuple[int, int]]
    M1: list[list[Fraction]] = field(repr=False)
    M2: list[list[Fraction]] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def is_symmetric(self) -> bool:
        n = self.size
        return all(
            self.M1[i][j] == self.M1[j][i] and self.M2[i][j] == self.M2[j][i]
            for i in range(n)
            for j in range(i)
        )

    def quadratic(self, v: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        """(v^T M2 v, v^T M1 v)."""
        n = self.size
        num = Fraction(0)
        den = Fraction(0)
        for i in range(n):
            if not v[i]:
                continue
            r2 = sum((self.M2[i][j] * v[j] for j in range(n) if v[j]), Fraction(0))
            r1 = sum((self.M1[i][j] * v[j] for j in range(n) if v[j]), Fraction(0))
            num += v[i] * r2
            den += v[i] * r1
        return num, den


def _inner_terms(a: int, b: int) -> list[tuple[Fraction, int, int]]:
    """int over t_k of (1-P1)^a P2^b as [(coef, A, B)] meaning coef * (1-P1')^A P2'^B."""
    return [
        (
            math.comb(b, j) * Fraction(math.factorial(a) * math.factorial(2 * j), math.factorial(a + 2 * j + 1)),
            a + 2 * j + 1,
            b - j,
        )
        for j in range(b + 1)
    ]


def build_forms(
    k: int,
    degree_cap: int | None = None,
    basis: Sequence[tuple[int, int]] | None = None,
    route: str = "closed",
) -> QuadFormPair:
    """Assemble M1, M2 exactly over the basis a + 2b <= degree_cap (or an explicit basis).

    ``route="expanded"`` evaluates every simplex integral by orbit expansion
    instead of the closed form; it is slower and serves as a cross-check.
    """
    if k < 2:
        raise ContractError("k must be >= 2")
    if basis is None:
        if degree_cap is None or degree_cap < 0:
            raise ContractError("need degree_cap >= 0 or an explicit basis")
        basis = basis_pairs(degree_cap)
    basis = list(basis)
    if len(basis) > MAX_BASIS:
        raise ResourceError(f"basis of {len(basis)} elements exceeds the cap of {MAX_BASIS}")
    if route == "closed":
        I1 = lambda A, B: power_sum_integral(k, A, B)  # noqa: E731
        I0 = lambda A, B: power_sum_integral(k - 1, A, B)  # noqa: E731
    elif route == "expanded":
        e1, e0 = OrbitExpander(k), OrbitExpander(k - 1)
        c1: dict = {}
        c0: dict = {}

        def I1(A, B):
            if (A, B) not in c1:
                c1[A, B] = e1.power_sum_integral(A, B)
            return c1[A, B]

        def I0(A, B):
            if (A, B) not in c0:
                c0[A, B] = e0.power_sum_integral(A, B)
            return c0[A, B]
    else:
        raise ContractError(f"unknown route {route!r}")

    n = len(basis)
    inner = [_inner_terms(a, b) for a, b in basis]
    M1 = [[Fraction(0)] * n for _ in range(n)]
    M2 = [[Fraction(0)] * n for _ in range(n)]
    for i, (a, b) in enumerate(basis):
        for j in range(i, n):
            a2, b2 = basis[j]
            M1[i][j] = M1[j][i] = I1(a + a2, b + b2)
            s = Fraction(0)
            for c1_, A1, B1 in inner[i]:
                for c2_, A2, B2 in inner[j]:
                    s += c1_ * c2_ * I0(A1 + A2, B1 + B2)
            M2[i][j] = M2[j][i] = k * s
    return QuadFormPair(k, basis, M1, M2)


# -- exact positive definiteness -------------------------------------------------------


def _common_denominator(M: list[list[Fraction]]) -> int:
    den = 1
    for row in M:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def leading_minors(M: list[list[Fraction]]) -> list[Fraction]:
    """Leading principal minors of a rational matrix, via fraction-free Bareiss elimination."""
    n = len(M)
    den = _common_denominator(M)
    A = [[int(x * den) for x in row] for row in M]
    minors = []
    prev = 1
    for kk in range(n):
        piv = A[kk][kk]
        minors.append(Fraction(piv, den ** (kk + 1)))
        if piv == 0:
            # the remaining minors are not produced by plain Bareiss; report and stop
            break
        for i in range(kk + 1, n):
            for j in range(kk + 1, n):
                A[i][j] = (A[i][j] * piv - A[i][kk] * A[kk][j]) // prev
        prev = piv
    return minors


def positive_definite(M: list[list[Fraction]]) -> tuple[bool, list[Fraction]]:
    """Sylvester's criterion on exact minors; also returns the LDL^T pivots."""
    minors = leading_minors(M)
    if len(minors) < len(M) or any(m <= 0 for m in minors):
        return False, []
    pivots = [minors[0]] + [minors[i] / minors[i - 1] for i in range(1, len(minors))]
    return True, pivots


# -- eigensolve -------------------------------------------------------------------------


@dataclass
class RhoResult:
    k: int
    basis: list[tuple[int, int]]
    rho: float
    vector: list[float]
    residual: float
    exact_rayleigh: Fraction | None = None
    eigenspace_dim: int = 1
    dps: int = 0

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "deg": max((a + 2 * b for a, b in self.basis), default=0),
            "rho": self.rho,
            "residual": self.residual,
            "vector": self.vector,
            "basis": [f"{a},{b}" for a, b in self.basis],
            "eigenspace_dim": self.eigenspace_dim,
        }


class NumericalError(KTupleError):
    pass


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * (Fraction(2) ** exp)


def optimize_rho(forms: QuadFormPair, dps: int | None = None, exact_check: bool = True) -> RhoResult:
    """Largest eigenvalue of M1^{-1} M2 with eigenvector.

    M1 is first certified positive definite in exact arithmetic.  The float
    solve scales both forms by 1/sqrt(diag M1), factors the scaled M1 by
    Cholesky, and diagonalizes L^{-1} M2 L^{-T}.  The working precision is
    chosen from the exact pivots so the reduction keeps about 30 digits.
    """
    n = forms.size
    M1, M2 = forms.M1, forms.M2
    pivots: list[Fraction] = []
    if exact_check:
        ok, pivots = positive_definite(M1)
        if not ok:
            raise ContractError("M1 is not positive definite on this basis")
    if dps is None:
        if pivots:
            # pivot_i / M1_ii bounds how much the scaled factor shrinks
            worst = min(float(mpmath.log10(_mp(p / M1[i][i]))) for i, p in enumerate(pivots))
            dps = 40 + int(-worst)
        else:
            dps = 60
    with mpmath.workdps(dps):
        A = mpmath.matrix(n, n)
        B = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                A[i, j] = _mp(M1[i][j])
                B[i, j] = _mp(M2[i][j])
        d = [1 / mpmath.sqrt(A[i, i]) for i in range(n)]
        As = mpmath.matrix(n, n)
        Bs = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                As[i, j] = A[i, j] * d[i] * d[j]
                Bs[i, j] = B[i, j] * d[i] * d[j]
        try:
            L = mpmath.cholesky(As)
        except ValueError as exc:
            raise NumericalError(f"Cholesky failed at {dps} digits: {exc}") from exc
        Li = mpmath.inverse(L)
        C = Li * Bs * Li.T
        C = (C + C.T) / 2
        E, Q = mpmath.eigsy(C)
        evals = [E[i] for i in range(n)]
        top = max(range(n), key=lambda i: evals[i])
        rho = evals[top]
        dim = sum(1 for e in evals if abs(e - rho) <= mpmath.mpf(10) ** -9 * abs(rho))
        w = Q[:, top]
        vs = Li.T * w
        v = [vs[i] * d[i] for i in range(n)]
        # normalize: largest coordinate is +1
        big = max(v, key=lambda x: abs(x))
        v = [x / big for x in v]
        vm = mpmath.matrix(v)
        r2 = B * vm
        r1 = A * vm
        res = mpmath.norm(r2 - rho * r1) / mpmath.norm(r2)
        vec_float = [float(x) for x in v]
        rho_f = float(rho)
        res_f = float(res)
    exact = None
    if exact_check:
        vq = [Fraction(x) for x in vec_float]
        num, den = forms.quadratic(vq)
        exact = num / den
    return RhoResult(forms.k, list(forms.basis), rho_f, vec_float, res_f, exact, dim, dps)


def evaluate_rho(F: SymmetricPoly, k: int, basis: Sequence[tuple[int, int]] | None = None) -> Fraction:
    """Exact Rayleigh quotient rho(F) = v^T M2 v / v^T M1 v."""
    if basis is None:
        basis = sorted(F.coeffs)
    forms = build_forms(k, basis=basis)
    return rayleigh(forms, F.vector(list(basis)))


def rayleigh(forms: QuadFormPair, v: Sequence[Fraction]) -> Fraction:
    num, den = forms.quadratic([Fraction(x) for x in v])
    if den == 0:
        raise ContractError("F vanishes on the simplex: zero denominator")
    return num / den


def rho_gate(rho: float, h: int) -> dict:
    """Whether rho exceeds 4h (unconditional) or 2h (assuming Elliott-Halberstam)."""
    return {"h": h, "rho": rho, "unconditional": rho > 4 * h, "elliott_halberstam": rho > 2 * h}


def tao_upper_bound(k: int) -> float:
    """k log k / (k - 1)."""
    if k < 2:
        raise ContractError("k must be >= 2")
    return k * math.log(k) / (k - 1)


# -- product construction ---------------------------------------------------------


@dataclass(frozen=True)
class ProductBound:
    k: int
    A: float
    T: float
    gamma: float  # int g^2
    mu: float  # int t g^2
    second_moment: float  # int t^2 g^2
    mass: float  # int g
    eta: float  # 1 - mu/gamma
    eta_printed: float  # (1 - (A-1)e^-A) / (A (1 - e^-A)), as displayed in print
    first_bound: float  # ((int g)^2 - eta^-2 (T/k) int u^2 g^2) / gamma
    middle: float  # closed form of first_bound
    middle_printed: float  # same closed form with the printed eta
    weak: float  # A - e^{2A}/(A k)
    quadrature_error: float  # worst relative gap, closed forms vs quadrature

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _g_integrals_quad(A: float, T: float) -> tuple[float, float, float, float]:
    g = lambda t: 1.0 / (1.0 + A * t)  # noqa: E731
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=400)
    gam = integrate.quad(lambda t: g(t) ** 2, 0, T, **opts)[0]
    mu = integrate.quad(lambda t: t * g(t) ** 2, 0, T, **opts)[0]
    sec = integrate.quad(lambda t: t * t * g(t) ** 2, 0, T, **opts)[0]
    mass = integrate.quad(g, 0, T, **opts)[0]
    return gam, mu, sec, mass


def product_construction_bound(k: int, A: float) -> ProductBound:
    """Lower bound on rho for F = prod g(k t_i), g(t) = 1/(1 + A t) on [0, T], 1 + AT = e^A."""
    if k < 2:
        raise ContractError("k must be >= 2")
    if not A > 1:
        raise ContractError("A must exceed 1")
    ea = math.exp(-A)
    T = (math.exp(A) - 1) / A
    gamma = (1 - ea) / A
    mu = (A - 1 + ea) / A**2
    sec = (math.exp(A) - 2 * A - ea) / A**3
    mass = 1.0
    eta = 1 - mu / gamma
    eta_printed = (1 - (A - 1) * ea) / (A * (1 - ea))
    if eta <= 0:
        raise ContractError(f"eta = {eta} <= 0: g^2 is not centred below 1")
    first = (mass**2 - T / (k * eta**2) * sec) / gamma
    core = math.exp(2 * A) / (A * k) * (1 - 2 * A * ea - math.exp(-2 * A)) * (1 - ea) ** 2
    middle = A / (1 - ea) - core / (1 - (A + 1) * ea) ** 2
    middle_printed = A / (1 - ea) - core / (1 - (A - 1) * ea) ** 2
    weak = A - math.exp(2 * A) / (A * k)
    q = _g_integrals_quad(A, T)
    qerr = max(abs(x - y) / abs(y) for x, y in zip(q, (gamma, mu, sec, mass)))
    return ProductBound(
        k, A, T, gamma, mu, sec, mass, eta, eta_printed, first, middle, middle_printed, weak, qerr
    )


def standard_A(k: float) -> float:
    """A = (log k + log log k) / 2."""
    return 0.5 * math.log(k) + 0.5 * math.log(math.log(k))


# -- m -> k -> B_m ----------------------------------------------------------------------


def m_to_k(m: int) -> int:
    """Smallest k with k log k > e^(8m + 4), by bracketing then bisection on a monotone map."""
    if m < 1:
        raise ContractError("m must be >= 1")
    with mpmath.workdps(60):
        target = mpmath.exp(8 * m + 4)
        f = lambda k: k * mpmath.log(k) > target  # noqa: E731
        hi = 2
        while not f(hi):
            hi *= 2
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid):
                hi = mid
            else:
                lo = mid
    return hi


@dataclass(frozen=True)
class BmResult:
    m: int
    k: int
    exp_bound: int  # ceil(e^(8m+5))
    construction_width: int
    interval_end: float  # 2 k log k
    pi_k: int
    pi_k_bound: float  # k / (log k - 4)
    pi_x: int
    pi_x_bound: float  # x/log x (1 + 1/log x) at x = 2k log k

    @property
    def pi_checks(self) -> tuple[bool, bool]:
        return self.pi_k <= self.pi_k_bound, self.pi_x >= self.pi_x_bound

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["pi_checks"] = list(self.pi_checks)
        return d


def b_m(m: int, table: PrimeTable) -> BmResult:
    k = m_to_k(m)
    x = 2 * k * math.log(k)
    if math.floor(x) > table.limit:
        raise ResourceError(f"B_m construction for m={m} needs primes up to {math.floor(x)}")
    cons = primes_in_interval_construction(k, table)
    width = cons.tuple.width
    if width > x:
        raise AssertionError(f"construction width {width} exceeds 2k log k = {x}")
    with mpmath.workdps(30):
        exp_bound = int(mpmath.ceil(mpmath.exp(8 * m + 5)))
    lx = math.log(x)
    return BmResult(
        m,
        k,
        exp_bound,
        width,
        x,
        table.pi(k),
        k / (math.log(k) - 4),
        table.pi(math.floor(x)),
        x / lx * (1 + 1 / lx),
    )
