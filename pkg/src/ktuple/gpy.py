"""One-dimensional GPY sieve machinery.

Covers the reciprocity law between weight systems, the exact S1/S2 quadratic
forms in both their lambda double-sum and diagonal forms, the beta integral
closed form for rho_k with F(t) = (1-t)^l / l!, and the (k, l, eta) criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from .errors import ContractError
from .primes import factorize
from .tuples import KTuple


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    return n == 1 or all(e == 1 for e in factorize(n).values())


def squarefree_upto(R: int) -> list[int]:
    flags = [True] * (R + 1)
    for d in range(2, math.isqrt(R) + 1):
        for m in range(d * d, R + 1, d * d):
            flags[m] = False
    return [n for n in range(1, R + 1) if flags[n]]


def mobius_sf(n: int) -> int:
    """mu(n) for squarefree n."""
    if n == 1:
        return 1
    return -1 if len(factorize(n)) % 2 else 1


class TupleArithmetic:
    """omega, omega*, phi_omega and phi on squarefree integers for a fixed tuple."""

    def __init__(self, t: KTuple):
        self.tuple = t
        self._cache: dict[int, int] = {}

    def omega_p(self, p: int) -> int:
        w = self._cache.get(p)
        if w is None:
            w = self._cache[p] = self.tuple.omega(p)
        return w

    def _primes(self, d: int) -> list[int]:
        fac = factorize(d) if d > 1 else {}
        if any(e > 1 for e in fac.values()):
            raise ContractError(f"{d} is not squarefree")
        return list(fac)

    def omega(self, d: int) -> int:
        return math.prod(self.omega_p(p) for p in self._primes(d))

    def omega_star(self, d: int) -> int:
        return math.prod(self.omega_p(p) - 1 for p in self._primes(d))

    def phi_omega(self, d: int) -> int:
        return math.prod(p - self.omega_p(p) for p in self._primes(d))

    def phi(self, d: int) -> int:
        return math.prod(p - 1 for p in self._primes(d))


def omega_direct(t: KTuple, d: int) -> int:
    """#{n mod d : d divides prod (n + a_i)} by brute force."""
    return sum(1 for n in range(d) if math.prod(n + a for a in t.offsets) % d == 0)


# -- reciprocity ---------------------------------------------------------------


def _check_support(f: Mapping[int, object], R: int) -> None:
    for n, v in f.items():
        if v and (n < 1 or n > R or not is_squarefree(n)):
            raise ContractError(f"support point {n} is not a squarefree integer <= {R}")


def _mobius_transform(f: Mapping[int, Fraction], R: int) -> dict[int, Fraction]:
    """g(d) = mu(d) * sum over squarefree n <= R with d | n of f(n)."""
    _check_support(f, R)
    support = sorted(n for n, v in f.items() if v)
    out: dict[int, Fraction] = {}
    for d in squarefree_upto(R):
        s = sum((f[n] for n in support if n % d == 0), Fraction(0))
        if s:
            out[d] = mobius_sf(d) * s
    return out


def reciprocity_forward(Y: Mapping[int, Fraction], R: int) -> dict[int, Fraction]:
    """L(d) = mu(d) sum'_{n: d|n} Y(n)."""
    return _mobius_transform(Y, R)


def reciprocity_backward(L: Mapping[int, Fraction], R: int) -> dict[int, Fraction]:
    """Y(r) = mu(r) sum'_{m: r|m} L(m)."""
    return _mobius_transform(L, R)


# -- S1 and S2 -----------------------------------------------------------------


@dataclass(frozen=True)
class SieveWeights:
    R: int
    y: dict[int, Fraction]
    lam: dict[int, Fraction]


def weights_from_y(t: KTuple, R: int, y: Mapping[int, Fraction]) -> SieveWeights:
    """lambda(d) from y(r) through Y = y omega/phi_omega and L = lambda omega/d."""
    ar = TupleArithmetic(t)
    _check_support(y, R)
    Y = {}
    for r, v in y.items():
        if v:
            po = ar.phi_omega(r)
            if po == 0:
                raise ContractError(f"phi_omega({r}) = 0: tuple is inadmissible")
            Y[r] = Fraction(v) * ar.omega(r) / po
    L = reciprocity_forward(Y, R)
    lam = {d: v * d / ar.omega(d) for d, v in L.items()}
    return SieveWeights(R, {r: Fraction(v) for r, v in y.items() if v}, lam)


def s1_exact(t: KTuple, R: int, y: Mapping[int, Fraction]) -> tuple[Fraction, Fraction]:
    """S1 as (double sum over lambda, diagonal sum over y)."""
    ar = TupleArithmetic(t)
    w = weights_from_y(t, R, y)
    items = sorted(w.lam.items())
    direct = Fraction(0)
    for d1, l1 in items:
        for d2, l2 in items:
            D = d1 * d2 // math.gcd(d1, d2)
            direct += l1 * l2 * ar.omega(D) / D
    diagonal = sum(
        (v * v * ar.omega(r) / ar.phi_omega(r) for r, v in w.y.items()), Fraction(0)
    )
    return direct, diagonal


def s2_exact(t: KTuple, R: int, y: Mapping[int, Fraction]) -> tuple[Fraction, Fraction]:
    """S2 = sum' lambda(d1) lambda(d2) omega*(D)/phi(D) two ways.

    The second route transforms L = lambda omega*/phi and sums
    Y(r)^2 phi_omega(r)/omega*(r) = y*(r)^2 omega*(r)/phi_omega(r) over r with
    omega*(r) != 0 (if omega*(p) = 0 every term with p | D vanishes anyway).
    """
    ar = TupleArithmetic(t)
    w = weights_from_y(t, R, y)
    items = sorted(w.lam.items())
    direct = Fraction(0)
    for d1, l1 in items:
        for d2, l2 in items:
            D = d1 * d2 // math.gcd(d1, d2)
            ws = ar.omega_star(D)
            if ws:
                direct += l1 * l2 * ws / ar.phi(D)
    L = {d: v * ar.omega_star(d) / ar.phi(d) for d, v in w.lam.items() if ar.omega_star(d)}
    Y = reciprocity_backward(L, R)
    diagonal = Fraction(0)
    for r, v in Y.items():
        ws = ar.omega_star(r)
        if ws:
            diagonal += v * v * ar.phi_omega(r) / ws
    return direct, diagonal


def y_star(t: KTuple, R: int, y: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """y*(r) = r/phi(r) sum'_{m: (m,r)=1} y(mr)/phi(m) (exact)."""
    ar = TupleArithmetic(t)
    out = {}
    for r in squarefree_upto(R):
        s = Fraction(0)
        for m in squarefree_upto(R // r):
            if math.gcd(m, r) == 1:
                v = y.get(m * r, 0)
                if v:
                    s += Fraction(v) / ar.phi(m)
        if s:
            out[r] = s * r / ar.phi(r)
    return out


def rational_y(R: int, F: Callable[[Fraction], Fraction], grid: int = 64) -> dict[int, Fraction]:
    """Rational y(r) = F(q_r), q_r = log r / log R rounded to a multiple of 1/grid."""
    out = {}
    for r in squarefree_upto(R):
        q = Fraction(round(grid * math.log(r) / math.log(R)), grid) if R > 1 else Fraction(0)
        v = Fraction(F(q))
        if v:
            out[r] = v
    return out


def s1_asymptotic_ratio(t: KTuple, R: int, F: Callable[[float], float], C: float) -> tuple[float, float]:
    """Float path with y(r) = F(log r / log R).

    Returns (C(a) S1 / (log R)^k, int_0^1 F(t)^2 t^(k-1)/(k-1)! dt); the two agree
    only as R grows, and slowly.
    """
    from scipy import integrate

    ar = TupleArithmetic(t)
    k = t.k
    logR = math.log(R)
    s = math.fsum(
        F(math.log(r) / logR) ** 2 * ar.omega(r) / ar.phi_omega(r) for r in squarefree_upto(R)
    )
    target, _ = integrate.quad(lambda u: F(u) ** 2 * u ** (k - 1) / math.factorial(k - 1), 0, 1)
    return C * s / logR**k, target


# -- rho_k for F = (1-t)^l / l! ---------------------------------------------------


def beta_integral(k: int, l: int) -> Fraction:
    """int_0^1 v^k/k! (1-v)^l/l! dv = 1/(k+l+1)!."""
    return Fraction(1, math.factorial(k + l + 1))


@lru_cache(maxsize=None)
def rho_k_closed_form(k: int, l: int) -> Fraction:
    """rho_k(F) for F(t) = (1-t)^l / l!, from the two beta integrals.

    Denominator int F^2 t^(k-1)/(k-1)! = C(2l, l)/(k+2l)!; with int_t^1 F = (1-t)^(l+1)/(l+1)!,
    numerator int (int_t^1 F)^2 t^(k-2)/(k-2)! = C(2l+2, l+1)/(k+2l+1)!.
    """
    if k < 2 or l < 0:
        raise ContractError("need k >= 2 and l >= 0")
    den = math.comb(2 * l, l) * beta_integral(k - 1, 2 * l)
    num = math.comb(2 * l + 2, l + 1) * beta_integral(k - 2, 2 * l + 2)
    rho = k * num / den
    closed = Fraction(2 * k * (2 * l + 1), (l + 1) * (k + 2 * l + 1))
    if rho != closed:
        raise AssertionError(f"beta route {rho} disagrees with closed form {closed}")
    return rho


@dataclass(frozen=True)
class GPYCondition:
    k: int
    l: int
    eta: Fraction

    def __post_init__(self):
        eta = Fraction(self.eta)
        object.__setattr__(self, "eta", eta)
        if self.k < 2 or self.l < 1:
            raise ContractError("need k >= 2 and l >= 1")
        if not (0 < eta < Fraction(1, 2)):
            raise ContractError("need 0 < eta < 1/2")


def thetal_holds(k: int, l: int, eta: Fraction) -> bool:
    """1 + 2 eta > (1 + 1/(2l+1)) (1 + (2l+1)/k), cross-multiplied over integers."""
    eta = Fraction(eta)
    P, Q = eta.numerator, eta.denominator
    m = 2 * l + 1
    return (Q + 2 * P) * k * m > Q * (m + 1) * (k + m)


def rho_criterion_holds(k: int, l: int, eta: Fraction) -> bool:
    """(1/2)(1/2 + eta) rho_k(l) > 1."""
    eta = Fraction(eta)
    rho = rho_k_closed_form(k, l)
    P, Q = eta.numerator, eta.denominator
    return (Q + 2 * P) * rho.numerator > 4 * Q * rho.denominator


def gpy_theorem_condition(c: GPYCondition) -> bool:
    a = thetal_holds(c.k, c.l, c.eta)
    b = rho_criterion_holds(c.k, c.l, c.eta)
    if a != b:
        raise AssertionError(f"criteria disagree at {c}")
    return a


def condition_equivalence_sweep(k_max: int = 200, l_max: int = 20, n_eta: int = 500) -> int:
    """Count disagreements between the two criteria over a rational grid.

    eta runs over i/(2 n_eta + 1), i = 1..n_eta, all inside (0, 1/2).
    """
    bad = 0
    den = 2 * n_eta + 1
    for k in range(2, k_max + 1):
        for l in range(1, l_max + 1):
            for i in range(1, n_eta + 1):
                eta = Fraction(i, den)
                if thetal_holds(k, l, eta) != rho_criterion_holds(k, l, eta):
                    bad += 1
    return bad
