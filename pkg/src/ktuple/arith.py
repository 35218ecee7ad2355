"""Arithmetic functions, Dirichlet convolution and exact checks of the
von Mangoldt identity toolkit.

Values such as Lambda(n) = log p are irrational, but every identity checked here
is a Q-linear relation among products of prime logarithms.  ``LogPrimeVector``
stores such values symbolically (monomial = sorted tuple of primes) so that
identities are verified by exact coefficient comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError
from .primes import factorize, smallest_prime_factors

EULER_GAMMA = 0.57721566490153286060651209008240243


class LogPrimeVector:
    """Exact rational combination of monomials in {log p}.

    ``terms`` maps a sorted tuple of primes (a monomial; repeats allowed) to a
    nonzero rational coefficient.  Degree-one vectors, the common case, have
    keys ``(p,)``.  The empty tuple is the constant monomial.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[tuple[int, ...], Rational] = {}
        if terms:
            for key, c in terms.items():
                if c:
                    self.terms[tuple(sorted(key))] = c

    @classmethod
    def log(cls, n: int) -> "LogPrimeVector":
        """log n = sum of e * log p over p^e || n."""
        return cls({(p,): e for p, e in factorize(n).items()})

    @classmethod
    def log_prime(cls, p: int, coeff: Rational = 1) -> "LogPrimeVector":
        return cls({(p,): coeff})

    def copy(self) -> "LogPrimeVector":
        v = LogPrimeVector()
        v.terms = dict(self.terms)
        return v

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, LogPrimeVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "LogPrimeVector(0)"
        parts = []
        for key in sorted(self.terms):
            mono = "*".join(f"log{p}" for p in key) or "1"
            parts.append(f"{self.terms[key]}*{mono}")
        return "LogPrimeVector(" + " + ".join(parts) + ")"

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def add_scaled(self, other: "LogPrimeVector", c: Rational = 1) -> None:
        """In place: self += c * other."""
        if not c:
            return
        t = self.terms
        for key, v in other.terms.items():
            s = t.get(key, 0) + c * v
            if s:
                t[key] = s
            else:
                t.pop(key, None)

    def __add__(self, other: "LogPrimeVector") -> "LogPrimeVector":
        if isinstance(other, int) and other == 0:
            return self.copy()
        out = self.copy()
        out.add_scaled(other, 1)
        return out

    __radd__ = __add__

    def __neg__(self) -> "LogPrimeVector":
        return LogPrimeVector({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "LogPrimeVector") -> "LogPrimeVector":
        out = self.copy()
        out.add_scaled(other, -1)
        return out

    def __mul__(self, other):
        if isinstance(other, LogPrimeVector):
            out: dict[tuple[int, ...], Rational] = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    key = tuple(sorted(k1 + k2))
                    out[key] = out.get(key, 0) + v1 * v2
            return LogPrimeVector(out)
        if isinstance(other, Rational):
            if not other:
                return LogPrimeVector()
            return LogPrimeVector({k: v * other for k, v in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LogPrimeVector":
        out = LogPrimeVector({(): 1})
        for _ in range(k):
            out = out * self
        return out

    def value(self) -> float:
        """Numerical value, each monomial evaluated in double precision."""
        return math.fsum(
            float(c) * math.prod(math.log(p) for p in key) for key, c in self.terms.items()
        )


ZERO = LogPrimeVector()

VALUE_KINDS = ("integer", "rational", "real", "log-vector")


@dataclass
class ArithSeq:
    """A sequence f(1..limit); ``values[0]`` is unused and kept at 0."""

    limit: int
    values: list
    value_kind: str = "integer"

    def __post_init__(self):
        if self.value_kind not in VALUE_KINDS:
            raise ContractError(f"unknown value kind {self.value_kind!r}")
        if len(self.values) != self.limit + 1:
            raise ContractError("values must have length limit + 1 (index 0 unused)")

    def __getitem__(self, n: int):
        return self.values[n]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArithSeq) or other.limit != self.limit:
            return False
        return all(a == b for a, b in zip(self.values[1:], other.values[1:]))

    def __add__(self, other: "ArithSeq") -> "ArithSeq":
        _same_limit(self, other)
        kind = _promote(self.value_kind, other.value_kind)
        vals = [0] + [_add(a, b) for a, b in zip(self.values[1:], other.values[1:])]
        return ArithSeq(self.limit, vals, kind)

    def __neg__(self) -> "ArithSeq":
        return ArithSeq(self.limit, [0] + [-v for v in self.values[1:]], self.value_kind)

    def __sub__(self, other: "ArithSeq") -> "ArithSeq":
        return self + (-other)

    def scale(self, c: Rational) -> "ArithSeq":
        return ArithSeq(self.limit, [0] + [v * c for v in self.values[1:]], self.value_kind)


def _add(a, b):
    if isinstance(a, LogPrimeVector) or isinstance(b, LogPrimeVector):
        if not isinstance(a, LogPrimeVector):
            if a != 0:
                raise ContractError("cannot add a scalar to a log-vector")
            return b.copy()
        if not isinstance(b, LogPrimeVector):
            if b != 0:
                raise ContractError("cannot add a scalar to a log-vector")
            return a.copy()
        return a + b
    return a + b


def _same_limit(f: ArithSeq, g: ArithSeq) -> None:
    if f.limit != g.limit:
        raise ContractError(f"mismatched limits {f.limit} and {g.limit}")


def _promote(k1: str, k2: str) -> str:
    if "log-vector" in (k1, k2):
        if "real" in (k1, k2):
            raise ContractError("real and log-vector sequences cannot be combined exactly")
        return "log-vector"
    return VALUE_KINDS[max(VALUE_KINDS.index(k1), VALUE_KINDS.index(k2))]


def _zero_of(kind: str):
    if kind == "log-vector":
        return None  # allocated lazily
    if kind == "real":
        return 0.0
    return 0


def dirichlet_convolve(f: ArithSeq, g: ArithSeq) -> ArithSeq:
    """(f*g)(n) = sum over ab = n of f(a) g(b), for n <= limit.

    Divisor-pair enumeration over a and its multiples; zero entries are skipped.
    """
    _same_limit(f, g)
    kind = _promote(f.value_kind, g.value_kind)
    N = f.limit
    fv, gv = f.values, g.values
    g_support = [b for b in range(1, N + 1) if gv[b]]
    if kind != "log-vector":
        out = [_zero_of(kind)] * (N + 1)
        for a in range(1, N + 1):
            fa = fv[a]
            if not fa:
                continue
            top = N // a
            for b in g_support:
                if b > top:
                    break
                out[a * b] += fa * gv[b]
        out[0] = 0
        return ArithSeq(N, out, kind)

    acc: list = [None] * (N + 1)
    f_vec = f.value_kind == "log-vector"
    g_vec = g.value_kind == "log-vector"
    for a in range(1, N + 1):
        fa = fv[a]
        if not fa:
            continue
        top = N // a
        for b in g_support:
            if b > top:
                break
            gb = gv[b]
            n = a * b
            slot = acc[n]
            if slot is None:
                slot = acc[n] = LogPrimeVector()
            if f_vec and g_vec:
                slot.add_scaled(fa * gb, 1)
            elif f_vec:
                slot.add_scaled(fa, gb)
            else:
                slot.add_scaled(gb, fa)
    vals = [0] + [v if v is not None else LogPrimeVector() for v in acc[1:]]
    return ArithSeq(N, vals, "log-vector")


# -- standard sequences -----------------------------------------------------


def mobius_sieve(N: int) -> list[int]:
    """mu(0..N) by a linear sieve (mu[0] = 0)."""
    mu = [0] * (N + 1)
    if N >= 1:
        mu[1] = 1
    is_comp = bytearray(N + 1)
    primes: list[int] = []
    for i in range(2, N + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > N:
                break
            is_comp[ip] = 1
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu


def prime_power_base(N: int) -> list[int]:
    """b[n] = p if n = p^m (m >= 1), else 0; by a linear sieve over smallest factors."""
    base = [0] * (N + 1)
    lp = [0] * (N + 1)
    primes: list[int] = []
    for i in range(2, N + 1):
        if lp[i] == 0:
            lp[i] = i
            primes.append(i)
        for p in primes:
            ip = i * p
            if p > lp[i] or ip > N:
                break
            lp[ip] = p
    for i in range(2, N + 1):
        p = lp[i]
        m = i
        while m % p == 0:
            m //= p
        if m == 1:
            base[i] = p
    return base


def ones(N: int) -> ArithSeq:
    return ArithSeq(N, [0] + [1] * N, "integer")


def identity_e(N: int) -> ArithSeq:
    return ArithSeq(N, [0, 1] + [0] * (N - 1), "integer")


def mobius(N: int) -> ArithSeq:
    return ArithSeq(N, mobius_sieve(N), "integer")


def log_seq(N: int) -> ArithSeq:
    """L(n) = log n as exact log-vectors."""
    spf = smallest_prime_factors(N)
    vals = [0, LogPrimeVector()]
    for n in range(2, N + 1):
        vals.append(LogPrimeVector({(p,): e for p, e in factorize(n, spf).items()}))
    return ArithSeq(N, vals[: N + 1], "log-vector")


def von_mangoldt(N: int) -> ArithSeq:
    """Lambda(n) = log p on prime powers p^m, 0 elsewhere."""
    base = prime_power_base(N)
    vals: list = [0]
    for n in range(1, N + 1):
        p = base[n]
        vals.append(LogPrimeVector({(p,): 1}) if p else LogPrimeVector())
    return ArithSeq(N, vals, "log-vector")


def divisor_count(N: int) -> np.ndarray:
    """tau(0..N) by summing over multiples (tau[0] = 0)."""
    tau = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        tau[d::d] += 1
    return tau


@dataclass(frozen=True)
class TruncationSpec:
    """Thresholds for truncated sequences g_{<W} ("below") and g_{>=W} ("at-or-above")."""

    U: int
    V: int = 1
    mode: str = "below"

    def __post_init__(self):
        if self.U < 1 or self.V < 1:
            raise ContractError("truncation thresholds must be >= 1")
        if self.mode not in ("below", "at-or-above"):
            raise ContractError(f"unknown truncation mode {self.mode!r}")


def truncate(f: ArithSeq, W: int, mode: str) -> ArithSeq:
    """Keep f(n) for n < W ("below") or n >= W ("at-or-above"); zero elsewhere."""
    if mode == "below":
        keep = lambda n: n < W  # noqa: E731
    elif mode == "at-or-above":
        keep = lambda n: n >= W  # noqa: E731
    else:
        raise ContractError(f"unknown truncation mode {mode!r}")
    zero = (lambda: LogPrimeVector()) if f.value_kind == "log-vector" else (lambda: 0)
    vals = [0] + [f.values[n] if keep(n) else zero() for n in range(1, f.limit + 1)]
    return ArithSeq(f.limit, vals, f.value_kind)


# -- generalized von Mangoldt -----------------------------------------------


def _multinomial_power(coeffs: Sequence[int], k: int) -> dict[tuple[int, ...], int]:
    """(sum_i c_i x_i)^k as {sorted index multiset: integer coefficient}."""
    nvar = len(coeffs)
    out: dict[tuple[int, ...], int] = {}

    def rec(i: int, left: int, mono: tuple, coef: int, denom: int):
        if i == nvar - 1:
            c = coeffs[i] ** left
            if c:
                key = mono + (i,) * left
                val = coef * c * math.factorial(k) // (denom * math.factorial(left))
                out[key] = out.get(key, 0) + val
            return
        for j in range(left + 1):
            c = coeffs[i] ** j
            if c:
                rec(i + 1, left - j, mono + (i,) * j, coef * c, denom * math.factorial(j))

    if nvar == 0:
        return {(): 1} if k == 0 else {}
    rec(0, k, (), 1, 1)
    return {key: v for key, v in out.items() if v}


@lru_cache(maxsize=None)
def _lambda_k_signature(exps: tuple[int, ...], k: int) -> tuple:
    """Lambda_k for n = prod p_i^{e_i}, as monomials over prime positions.

    Only squarefree d contribute, so the divisor sum runs over subsets S of the
    prime positions: sum_S (-1)^|S| (sum_i (e_i - [i in S]) log p_i)^k.
    """
    nu = len(exps)
    acc: dict[tuple[int, ...], int] = {}
    for r in range(nu + 1):
        sign = -1 if r % 2 else 1
        for S in combinations(range(nu), r):
            coeffs = list(exps)
            for i in S:
                coeffs[i] -= 1
            for key, v in _multinomial_power(coeffs, k).items():
                acc[key] = acc.get(key, 0) + sign * v
    return tuple((key, v) for key, v in sorted(acc.items()) if v)


def lambda_k_from_factorization(fac: dict[int, int], k: int) -> LogPrimeVector:
    """Lambda_k(n) = sum_{d | n} mu(d) (log n/d)^k given n's factorization."""
    if k < 1:
        raise ContractError("k must be >= 1")
    primes = sorted(fac)
    exps = tuple(fac[p] for p in primes)
    terms = {}
    for key, v in _lambda_k_signature(exps, k):
        terms[tuple(primes[i] for i in key)] = v
    return LogPrimeVector(terms)


def lambda_k(n: int, k: int) -> LogPrimeVector:
    """Generalized von Mangoldt function as an exact degree-k log-prime polynomial."""
    if n < 1:
        raise ContractError("n must be >= 1")
    return lambda_k_from_factorization(factorize(n), k)


def lambda_k_direct(n: int, k: int) -> LogPrimeVector:
    """Lambda_k(n) straight from the divisor-sum definition (slow reference path)."""
    total = LogPrimeVector()
    for d in range(1, n + 1):
        if n % d:
            continue
        fac = factorize(d) if d > 1 else {}
        if any(e > 1 for e in fac.values()):
            continue
        mu = -1 if len(fac) % 2 else 1
        total.add_scaled(LogPrimeVector.log(n // d) ** k if n // d > 1 else _log1_pow(k), mu)
    return total


def _log1_pow(k: int) -> LogPrimeVector:
    return LogPrimeVector() if k > 0 else LogPrimeVector({(): 1})


# -- identity decompositions --------------------------------------------------


@dataclass
class VaughanTerms:
    """Components of Vaughan's identity for given U, V.

    ``combined()`` = t1 - t2 + t3 equals Lambda_{>=V};  adding ``lam_small``
    (Lambda_{<V}) recovers Lambda.
    """

    U: int
    V: int
    t1: ArithSeq  # mu_{<U} * L
    t2: ArithSeq  # mu_{<U} * Lambda_{<V} * 1
    t3: ArithSeq  # mu_{>=U} * Lambda_{>=V} * 1
    lam_small: ArithSeq  # Lambda_{<V}

    def combined(self) -> ArithSeq:
        return self.t1 - self.t2 + self.t3

    def full(self) -> ArithSeq:
        return self.combined() + self.lam_small


def vaughan_decompose(n_range: int, U: int, V: int) -> VaughanTerms:
    spec = TruncationSpec(U, V)
    N = n_range
    mu, lam, one, L = mobius(N), von_mangoldt(N), ones(N), log_seq(N)
    mu_lo = truncate(mu, spec.U, "below")
    mu_hi = truncate(mu, spec.U, "at-or-above")
    lam_lo = truncate(lam, spec.V, "below")
    lam_hi = truncate(lam, spec.V, "at-or-above")
    t1 = dirichlet_convolve(mu_lo, L)
    t2 = dirichlet_convolve(dirichlet_convolve(mu_lo, lam_lo), one)
    t3 = dirichlet_convolve(dirichlet_convolve(mu_hi, lam_hi), one)
    return VaughanTerms(U, V, t1, t2, t3, lam_lo)


def heathbrown_decompose(n_range: int, U: int, k: int) -> ArithSeq:
    """sum_{j=1..k} (-1)^(j-1) C(k,j) mu_{<=U}^{*j} * 1^{*(j-1)} * L, valid for n <= U^k."""
    if k < 1 or U < 1:
        raise ContractError("need k >= 1 and U >= 1")
    if n_range > U**k:
        raise ContractError(f"n_range={n_range} exceeds U^k={U**k}")
    N = n_range
    mu_u = truncate(mobius(N), U + 1, "below")
    one = ones(N)
    L = log_seq(N)
    total = ArithSeq(N, [0] + [LogPrimeVector() for _ in range(N)], "log-vector")
    mu_pow = mu_u  # mu_{<=U}^{*j}
    one_pow = identity_e(N)  # 1^{*(j-1)}
    for j in range(1, k + 1):
        if j > 1:
            mu_pow = dirichlet_convolve(mu_pow, mu_u)
            one_pow = dirichlet_convolve(one_pow, one)
        kernel = dirichlet_convolve(mu_pow, one_pow)
        term = dirichlet_convolve(kernel, L)
        c = (-1) ** (j - 1) * math.comb(k, j)
        total = total + term.scale(c)
    return total


# -- Dirichlet divisor problem ---------------------------------------------------


def divisor_summatory(x: int) -> int:
    """sum_{n<=x} tau(n) by the hyperbola split at sqrt(x)."""
    r = math.isqrt(x)
    return 2 * sum(x // d for d in range(1, r + 1)) - r * r


def divisor_summatory_naive(x: int) -> int:
    return int(divisor_count(x)[1:].sum())


def hyperbola_tau_average(x: int, cross_check: bool = True) -> tuple[float, float]:
    """Return ((1/x) sum tau(n), deviation from log x + 2*gamma - 1)."""
    if x < 4:
        raise ContractError("x must be >= 4")
    s = divisor_summatory(x)
    if cross_check and x <= 10**7:
        naive = divisor_summatory_naive(x)
        if naive != s:
            raise AssertionError(f"hyperbola sum {s} != naive divisor sum {naive} at x={x}")
    avg = s / x
    return avg, avg - (math.log(x) + 2 * EULER_GAMMA - 1)


# -- helpers for exhaustive checks -------------------------------------------------


def lambda_seq(N: int) -> ArithSeq:
    return von_mangoldt(N)


def mismatches(f: ArithSeq, g: ArithSeq, start: int = 1) -> list[int]:
    """Indices n >= start where f(n) != g(n) (exact comparison)."""
    _same_limit(f, g)
    out = []
    for n in range(start, f.limit + 1):
        a, b = f.values[n], g.values[n]
        if isinstance(a, LogPrimeVector) or isinstance(b, LogPrimeVector):
            a = a if isinstance(a, LogPrimeVector) else (ZERO if a == 0 else a)
            b = b if isinstance(b, LogPrimeVector) else (ZERO if b == 0 else b)
        if a != b:
            out.append(n)
    return out


def nu(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n)) if n > 1 else 0


def iter_factorizations(N: int) -> Iterable[tuple[int, dict[int, int]]]:
    spf = smallest_prime_factors(N)
    for n in range(1, N + 1):
        yield n, (factorize(n, spf) if n > 1 else {})


def as_fraction(x) -> Fraction:
    return Fraction(x)
