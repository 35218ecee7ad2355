"""Exponential sums  S = sum_n e_q(a/n + b/(n + delta) + c n).

Omission rule: for each prime p | q, n is dropped when a != 0 (mod p) and p | n,
or b != 0 (mod p) and p | n + delta.  A term whose coefficient vanishes mod p
does not make n singular at p.  With this rule the complete sum over a
squarefree modulus factors exactly over its primes.

Composite moduli are summed directly with the pseudo-inverse n^(2 lambda(q) - 1)
(lambda = Carmichael function), which equals 1/n modulo each p not dividing n
and 0 modulo each p dividing n.  The CRT route multiplies per-prime sums with
coefficients scaled by u_p = (q/p)^-1 mod p, since 1/q = sum_p u_p/p mod 1.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError
from .primes import factorize

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExpSumSpec:
    q: int
    a: int = 0
    b: int = 0
    delta: int = 0
    c: int = 0
    interval: tuple[int, int] | None = None  # inclusive [N1, N2]; None = complete

    def __post_init__(self):
        if self.q < 1:
            raise ContractError("modulus must be >= 1")
        if self.interval is not None:
            n1, n2 = self.interval
            if n2 < n1:
                raise ContractError("empty interval")

    def negated(self) -> "ExpSumSpec":
        return ExpSumSpec(self.q, -self.a, -self.b, self.delta, -self.c, self.interval)

    @property
    def length(self) -> int:
        if self.interval is None:
            return self.q
        return self.interval[1] - self.interval[0] + 1


@dataclass(frozen=True)
class SumValue:
    value: complex
    count: int  # summands kept
    q: int

    @property
    def modulus_of_value(self) -> float:
        return abs(self.value)

    @property
    def normalized(self) -> float:
        return abs(self.value) / math.sqrt(self.q)


def _is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


@lru_cache(maxsize=4096)
def inverse_table(p: int) -> np.ndarray:
    """inv[n] = n^-1 mod p for 1 <= n < p (inv[0] = 0), by the linear recurrence.

    The returned array is shared between callers and marked read-only.
    """
    inv = [0] * p
    if p > 1:
        inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - (p // i) * inv[p % i] % p) % p
    arr = np.array(inv, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def carmichael(q: int) -> int:
    lam = 1
    for p, e in (factorize(q) if q > 1 else {}).items():
        if p == 2 and e >= 3:
            l = 2 ** (e - 2)
        else:
            l = (p - 1) * p ** (e - 1)
        lam = lam * l // math.gcd(lam, l)
    return lam


def _keep_mask(n: np.ndarray, spec: ExpSumSpec, primes: Sequence[int]) -> np.ndarray:
    keep = np.ones(len(n), dtype=bool)
    for p in primes:
        if spec.a % p:
            keep &= n % p != 0
        if spec.b % p:
            keep &= (n + spec.delta) % p != 0
    return keep


def _phase_sum(phases: np.ndarray, q: int) -> complex:
    # numpy's sum is pairwise, which keeps rounding at O(log n) ulps
    z = np.exp(1j * (TWO_PI / q) * phases.astype(np.float64))
    return complex(z.sum())


def complete_sum_prime(spec: ExpSumSpec) -> SumValue:
    p = spec.q
    if not _is_prime(p):
        raise ContractError(f"{p} is not prime")
    inv = inverse_table(p)
    n = np.arange(p, dtype=np.int64)
    keep = _keep_mask(n, spec, [p])
    n = n[keep]
    f = (spec.a % p) * inv[n] + (spec.b % p) * inv[(n + spec.delta) % p] + (spec.c % p) * n
    return SumValue(_phase_sum(f % p, p), int(len(n)), p)


def _terms_direct(spec: ExpSumSpec, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Phases mod q for the n that survive omission (pseudo-inverse route)."""
    q = spec.q
    primes = list(factorize(q)) if q > 1 else []
    keep = _keep_mask(n, spec, primes)
    n = n[keep]
    if q == 1:
        return n, np.zeros(len(n), dtype=np.int64)
    e = 2 * carmichael(q) - 1
    if q < 1 << 31:
        pi1 = _powmod(n % q, e, q)
        pi2 = _powmod((n + spec.delta) % q, e, q)
        f = ((spec.a % q) * pi1 % q + (spec.b % q) * pi2 % q + (spec.c % q) * (n % q) % q) % q
        return n, f
    vals = []
    for m in n.tolist():
        pi1 = pow(m % q, e, q)
        pi2 = pow((m + spec.delta) % q, e, q)
        vals.append((spec.a * pi1 + spec.b * pi2 + spec.c * m) % q)
    return n, np.array(vals, dtype=object)


def _powmod(base: np.ndarray, e: int, q: int) -> np.ndarray:
    """Elementwise base^e mod q by square-and-multiply (q < 2^31 keeps products in int64)."""
    out = np.ones_like(base) % q
    b = base.astype(np.int64) % q
    while e:
        if e & 1:
            out = out * b % q
        b = b * b % q
        e >>= 1
    return out


def complete_sum_direct(spec: ExpSumSpec) -> SumValue:
    """Complete sum over n mod q for any squarefree q, summed term by term."""
    n, f = _terms_direct(spec, np.arange(spec.q, dtype=np.int64))
    return SumValue(_phase_sum(f, spec.q), int(len(n)), spec.q)


def complete_sum_crt(spec: ExpSumSpec, check: bool = True) -> SumValue:
    """Product over p | q of the per-prime complete sums (q squarefree)."""
    q = spec.q
    fac = factorize(q) if q > 1 else {}
    if any(e > 1 for e in fac.values()):
        raise ContractError(f"{q} is not squarefree")
    value = 1 + 0j
    count = 1
    for p in fac:
        u = pow((q // p) % p, -1, p) if p > 1 else 1
        part = complete_sum_prime(ExpSumSpec(p, u * spec.a % p, u * spec.b % p, spec.delta % p, u * spec.c % p))
        value *= part.value
        count *= part.count
    out = SumValue(value, count, q)
    if check and q <= 10**4:
        direct = complete_sum_direct(spec)
        if abs(direct.value - value) > 1e-8 * max(1.0, math.sqrt(q)) or direct.count != count:
            raise AssertionError(f"CRT product {value} != direct {direct.value} for {spec}")
    return out


# -- incomplete sums ---------------------------------------------------------------


def interval_transform(q: int, n1: int, n2: int) -> np.ndarray:
    """I_hat(h) = sum_{n1<=n<=n2} e_q(h n), h = 0..q-1, as a closed geometric sum."""
    M = n2 - n1 + 1
    h = np.arange(q, dtype=np.float64)
    out = np.empty(q, dtype=np.complex128)
    out[0] = M
    hh = h[1:]
    num = 1 - np.exp(1j * TWO_PI * ((hh * M) % q) / q)
    den = 1 - np.exp(1j * TWO_PI * hh / q)
    out[1:] = np.exp(1j * TWO_PI * ((hh * n1) % q) / q) * num / den
    return out


@dataclass(frozen=True)
class PlancherelDecomposition:
    direct: complex
    reconstructed: complex
    main_term: complex  # h = 0 contribution
    max_transform_ratio: float  # max_h |I_hat(h)| / min(M, q/(2|h|))

    @property
    def relative_gap(self) -> float:
        return abs(self.direct - self.reconstructed) / max(1.0, abs(self.direct))


def incomplete_direct(spec: ExpSumSpec) -> SumValue:
    n1, n2 = spec.interval if spec.interval is not None else (0, spec.q - 1)
    n, f = _terms_direct(spec, np.arange(n1, n2 + 1, dtype=np.int64))
    return SumValue(_phase_sum(f, spec.q), int(len(n)), spec.q)


def incomplete_via_plancherel(spec: ExpSumSpec) -> tuple[SumValue, PlancherelDecomposition]:
    """Direct incomplete sum and its reconstruction (1/q) sum_h I_hat(h) f_hat(-h)."""
    q = spec.q
    if spec.interval is None:
        n1, n2 = 0, q - 1
    else:
        n1, n2 = spec.interval
    M = n2 - n1 + 1
    if M > q:
        raise ContractError(f"interval length {M} exceeds the modulus {q}")
    direct = incomplete_direct(ExpSumSpec(q, spec.a, spec.b, spec.delta, spec.c, (n1, n2)))
    # f on all residues (omitted n contribute 0)
    n, f = _terms_direct(spec, np.arange(q, dtype=np.int64))
    g = np.zeros(q, dtype=np.complex128)
    g[n] = np.exp(1j * (TWO_PI / q) * f.astype(np.float64))
    G = np.fft.fft(g)  # G[h] = sum_n g(n) e_q(-h n)
    Ih = interval_transform(q, n1, n2)
    terms = Ih * G / q
    recon = complex(terms.sum())
    h = np.arange(1, q)
    circ = np.minimum(h, q - h)
    cap = np.minimum(float(M), q / (2.0 * circ))
    ratio = float(np.max(np.abs(Ih[1:]) / cap)) if q > 1 else 0.0
    return direct, PlancherelDecomposition(direct.value, recon, complex(terms[0]), ratio)


# -- Graham-Ringrose -----------------------------------------------------------------


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in (factorize(n) if n > 1 else {}).items():
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def tau(n: int) -> int:
    return math.prod(e + 1 for e in (factorize(n) if n > 1 else {}).values())


def split_modulus(q: int, y: int) -> tuple[int, int]:
    """q1 = largest divisor of q that is <= (q y)^(1/3); q2 = q / q1."""
    cap = (q * y) ** (1.0 / 3.0)
    # guard the float cube root against off-by-one at perfect cubes
    q1 = max(d for d in divisors(q) if d**3 <= q * y and d <= cap + 1)
    return q1, q // q1


@dataclass(frozen=True)
class GRBound:
    actual: float
    bound: float
    path: str  # "trivial", "split" or "complete"
    q1: int
    q2: int
    N: int

    @property
    def ratio(self) -> float:
        return self.actual / self.bound if self.bound else float("inf")


def graham_ringrose_bound(
    spec: ExpSumSpec, q1: int, q2: int, A: float = 2.0, constant: float = 1.0
) -> GRBound:
    """|S| over an interval of length N against the split-modulus bound.

    N <= q1: the trivial bound N (<= sqrt(q1 N)).  N > q2: completing the sum
    gives constant * 2^nu(q) sqrt(q) log q.  Otherwise
    constant * (q1^(1/2) + q2^(1/4)) tau(q)^A log q N^(1/2).
    ``A`` and ``constant`` are free parameters; nothing here is a proved value.
    """
    q = spec.q
    if q1 * q2 != q or q1 < 1 or q2 < 1:
        raise ContractError(f"q1*q2 = {q1 * q2} != q = {q}")
    if spec.interval is None:
        raise ContractError("an interval is required")
    N = spec.length
    if not 1 <= N <= q:
        raise ContractError(f"interval length {N} outside [1, {q}]")
    actual = incomplete_direct(spec).modulus_of_value
    logq = math.log(q) if q > 1 else 1.0
    if N <= q1:
        bound, path = float(N), "trivial"
    elif N > q2:
        nu = len(factorize(q)) if q > 1 else 0
        bound, path = constant * 2**nu * math.sqrt(q) * logq, "complete"
    else:
        bound = constant * (math.sqrt(q1) + q2**0.25) * tau(q) ** A * logq * math.sqrt(N)
        path = "split"
    return GRBound(actual, bound, path, q1, q2, N)


def normalized_gr_ratio(actual: float, N: int, q1: int, q2: int) -> float:
    """actual / (sqrt(N) (sqrt(q1) + q2^(1/4)))."""
    return actual / (math.sqrt(N) * (math.sqrt(q1) + q2**0.25))


def gr_ratio_sweep(q: int, y: int, N: int, trials: int, seed: int) -> list[float]:
    rng = random.Random(seed)
    q1, q2 = split_modulus(q, y)
    out = []
    for _ in range(trials):
        a, b, c = rng.randrange(q), rng.randrange(q), rng.randrange(q)
        delta = rng.randrange(1, q)
        n1 = rng.randrange(q - N + 1)
        s = incomplete_direct(ExpSumSpec(q, a, b, delta, c, (n1, n1 + N - 1)))
        out.append(normalized_gr_ratio(s.modulus_of_value, N, q1, q2))
    return out


# -- Weil sweep ---------------------------------------------------------------------


@dataclass
class WeilSweep:
    seed: int
    samples: int
    kappa_obs: float = 0.0
    worst: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)


def weil_sweep(samples: int = 10**4, seed: int = 0, p_lo: int = 5, p_hi: int = 500, keep_rows: bool = False) -> WeilSweep:
    """Sample nondegenerate (p, a, b, c, delta) and record max |S|/sqrt(p).

    a, b, c are uniform in [0, p) and delta in [1, p); (0, 0, 0) is resampled.
    """
    from .primes import simple_sieve

    rng = random.Random(seed)
    primes = [int(p) for p in simple_sieve(p_hi) if p >= p_lo]
    out = WeilSweep(seed, samples)
    for _ in range(samples):
        p = rng.choice(primes)
        while True:
            a, b, c = rng.randrange(p), rng.randrange(p), rng.randrange(p)
            if a or b or c:
                break
        delta = rng.randrange(1, p)
        spec = ExpSumSpec(p, a, b, delta, c)
        n = np.arange(p, dtype=np.int64)
        n = n[_keep_mask(n, spec, [p])]
        inv = inverse_table(p)
        f = (a * inv[n] + b * inv[(n + delta) % p] + c * n) % p
        s = abs(_phase_sum(f, p))
        norm = s / math.sqrt(p)
        if keep_rows:
            out.rows.append({"p": p, "a": a, "b": b, "c": c, "delta": delta, "absS": s, "normS": norm})
        if norm > out.kappa_obs:
            out.kappa_obs = norm
            out.worst = {"p": p, "a": a, "b": b, "c": c, "delta": delta}
    return out
