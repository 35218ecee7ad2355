"""Exact integration of symmetric polynomials over the simplex
T_k = {t in R^k : t_i >= 0, t_1 + ... + t_k <= 1}.

Two independent evaluations of

    I_k(A, B) = int_{T_k} (1 - P1)^A P2^B,     P1 = sum t_i,  P2 = sum t_i^2,

are provided:

* ``power_sum_integral``: closed form.  Expanding P2^B over orbits of
  partitions lam of B and using the Dirichlet integral with one extra variable
  (1 - P1) gives  A! * B! * sum_lam orbit(lam) prod (2 lam_i)!/lam_i! / (k + A + 2B)!.
* ``power_sum_integral_expanded``: expands (1 - P1)^A binomially, builds
  P1^j P2^B in the monomial-symmetric (orbit) basis by repeated multiplication
  with merging, then integrates orbit by orbit with the plain Dirichlet formula.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import ContractError, ResourceError

MAX_EXPANSION_TERMS = 10**7


def partitions(n: int, max_part: int | None = None, max_len: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n in non-increasing order, optionally bounded in part size and length."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in partitions(n - p, p, None if max_len is None else max_len - 1):
            yield (p,) + rest


def orbit_size(lam: tuple[int, ...], k: int) -> int:
    """Number of distinct monomials t^alpha with alpha a rearrangement of lam padded to length k."""
    l = len(lam)
    if l > k:
        return 0
    out = math.factorial(k) // math.factorial(k - l)
    for m in Counter(lam).values():
        out //= math.factorial(m)
    return out


@dataclass(frozen=True)
class SimplexMonomial:
    """t_1^e_1 ... t_k^e_k; missing trailing exponents are zero."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ContractError("exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def simplex_integrate(m: SimplexMonomial, k: int) -> Fraction:
    """Dirichlet integral: prod e_i! / (k + sum e_i)!."""
    if k < 1:
        raise ContractError("k must be >= 1")
    if len(m.exponents) > k:
        raise ContractError(f"{len(m.exponents)} exponents for dimension {k}")
    num = math.prod(math.factorial(e) for e in m.exponents)
    return Fraction(num, math.factorial(k + m.degree))


# -- closed form -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _p2_orbit_weight(k: int, B: int) -> int:
    """B! * sum over partitions lam of B (<= k parts) of orbit(lam) prod (2 lam_i)!/lam_i!."""
    total = 0
    for lam in partitions(B, max_len=k):
        w = orbit_size(lam, k)
        for x in lam:
            w *= math.factorial(2 * x) // math.factorial(x)
        total += w
    return total * math.factorial(B)


@lru_cache(maxsize=None)
def power_sum_integral(k: int, A: int, B: int) -> Fraction:
    """int_{T_k} (1 - P1)^A P2^B, exactly."""
    if k < 1 or A < 0 or B < 0:
        raise ContractError("need k >= 1 and A, B >= 0")
    return Fraction(math.factorial(A) * _p2_orbit_weight(k, B), math.factorial(k + A + 2 * B))


# -- orbit expansion ----------------------------------------------------------------


def multiply_power_sum(poly: dict[tuple[int, ...], int], r: int, k: int) -> dict[tuple[int, ...], int]:
    """poly * p_r, all in the orbit basis m_lam (lam a partition with <= k parts).

    t^lam * t_i^r lands on mu = lam with one part v raised to v + r (v = 0 allowed
    while lam has fewer than k parts).  The coefficient of m_mu picks up the
    number of parts of mu equal to v + r: that many positions i give t^mu.
    """
    out: dict[tuple[int, ...], int] = {}
    for lam, c in poly.items():
        values = set(lam)
        if len(lam) < k:
            values.add(0)
        for v in values:
            parts = list(lam)
            if v == 0:
                parts.append(r)
            else:
                parts[parts.index(v)] = v + r
            mu = tuple(sorted(parts, reverse=True))
            mult = mu.count(v + r)
            out[mu] = out.get(mu, 0) + c * mult
    if len(out) > MAX_EXPANSION_TERMS:
        raise ResourceError(f"orbit expansion exceeded {MAX_EXPANSION_TERMS} terms")
    return out


class OrbitExpander:
    """Memoized orbit expansions of P1^j P2^B in dimension k."""

    def __init__(self, k: int):
        self.k = k
        self._memo: dict[tuple[int, int], dict] = {(0, 0): {(): 1}}

    def expand(self, j: int, B: int) -> dict[tuple[int, ...], int]:
        key = (j, B)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if j > 0:
            out = multiply_power_sum(self.expand(j - 1, B), 1, self.k)
        else:
            out = multiply_power_sum(self.expand(0, B - 1), 2, self.k)
        self._memo[key] = out
        return out

    def integrate_orbits(self, poly: dict[tuple[int, ...], int], degree: int) -> Fraction:
        """int_{T_k} sum_lam c_lam m_lam for a homogeneous poly of the given degree."""
        num = 0
        for lam, c in poly.items():
            num += c * orbit_size(lam, self.k) * math.prod(math.factorial(x) for x in lam)
        return Fraction(num, math.factorial(self.k + degree))

    def power_sum_integral(self, A: int, B: int) -> Fraction:
        total = Fraction(0)
        for j in range(A + 1):
            term = self.integrate_orbits(self.expand(j, B), j + 2 * B)
            total += (-1) ** j * math.comb(A, j) * term
        return total


def power_sum_integral_expanded(k: int, A: int, B: int) -> Fraction:
    return OrbitExpander(k).power_sum_integral(A, B)


# -- symmetric polynomials in (1 - P1, P2) ---------------------------------------------


def basis_pairs(degree_cap: int) -> list[tuple[int, int]]:
    """All (a, b) with a + 2b <= degree_cap, ordered by b then a."""
    return [(a, b) for b in range(degree_cap // 2 + 1) for a in range(degree_cap - 2 * b + 1)]


@dataclass
class SymmetricPoly:
    """sum c_{a,b} (1 - P1)^a P2^b with exact rational coefficients."""

    coeffs: dict[tuple[int, int], Fraction]

    def __post_init__(self):
        self.coeffs = {key: Fraction(v) for key, v in self.coeffs.items() if v}

    @property
    def degree_cap(self) -> int:
        return max((a + 2 * b for a, b in self.coeffs), default=0)

    @classmethod
    def from_power_sums(cls, terms: dict[tuple[int, int], Fraction]) -> "SymmetricPoly":
        """Build from {(i, j): c} meaning sum c P1^i P2^j, rewriting P1 = 1 - (1 - P1)."""
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in terms.items():
            for a in range(i + 1):
                key = (a, j)
                out[key] = out.get(key, 0) + Fraction(c) * math.comb(i, a) * (-1) ** a
        return cls(out)

    @classmethod
    def parse(cls, coeffs: list[Fraction], basis: list[str]) -> "SymmetricPoly":
        """Coefficients paired with monomial names like 'P1P2', 'P1^2', 'P2', '1'."""
        if len(coeffs) != len(basis):
            raise ContractError("coefficient and basis lists differ in length")
        terms: dict[tuple[int, int], Fraction] = {}
        for c, name in zip(coeffs, basis):
            key = parse_power_sum_monomial(name)
            terms[key] = terms.get(key, 0) + Fraction(c)
        return cls.from_power_sums(terms)

    def evaluate(self, t: list[float]) -> float:
        p1 = sum(t)
        p2 = sum(x * x for x in t)
        return sum(float(c) * (1 - p1) ** a * p2**b for (a, b), c in self.coeffs.items())

    def vector(self, basis: list[tuple[int, int]]) -> list[Fraction]:
        missing = set(self.coeffs) - set(basis)
        if missing:
            raise ContractError(f"basis lacks {sorted(missing)}")
        return [self.coeffs.get(key, Fraction(0)) for key in basis]


def parse_power_sum_monomial(name: str) -> tuple[int, int]:
    """'P1^2P2' -> (2, 1); '1' -> (0, 0)."""
    s = name.replace(" ", "").replace("*", "")
    if s == "1":
        return (0, 0)
    i = j = 0
    pos = 0
    while pos < len(s):
        if s[pos] != "P" or pos + 1 >= len(s) or s[pos + 1] not in "12":
            raise ContractError(f"cannot parse monomial {name!r}")
        which = s[pos + 1]
        pos += 2
        exp = 1
        if pos < len(s) and s[pos] == "^":
            end = pos + 1
            while end < len(s) and s[end].isdigit():
                end += 1
            if end == pos + 1:
                raise ContractError(f"cannot parse monomial {name!r}")
            exp = int(s[pos + 1 : end])
            pos = end
        if which == "1":
            i += exp
        else:
            j += exp
    return (i, j)
