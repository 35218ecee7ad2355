"""Hardy-Littlewood singular series, prime-tuple count predictions and the
major-arc (Ramanujan sum) series.

Tail control for the Euler product
----------------------------------
Beyond the truncation prime P we require P > max(2k, width), so every p > P has
omega(p) = k and

    log f(p) = log(1 - k/p) - k log(1 - 1/p) = sum_{j>=2} (k - k^j)/j * p^-j .

Summing over p > P term by term gives sum_j (k - k^j)/j * (P(j) - sum_{p<=P} p^-j)
with P(j) the prime zeta function.  The j > J remainder is at most

    sum_{p>P} sum_{j>J} (k/p)^j / j  <=  k^(J+1) / (J (J+1) (1 - k/P) P^J),

which is what ``tail_bound`` reports (converted to an absolute error on C).

The crude route used as a cross-check ignores the expansion: for p > 2k each
|log f(p)| <= (k/p)^2 / (2 (1 - k/p)) <= c k^2/p^2 with c = 1, so the whole tail is
at most k^2 / P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .errors import ContractError, OutOfRangeError
from .primes import PrimeTable, simple_sieve
from .tuples import KTuple, residue_profile

DEFAULT_TRUNCATION = 1000


@dataclass(frozen=True)
class SingularSeries:
    tuple: KTuple
    value: mpmath.mpf
    truncation_prime: int
    tail_bound: float
    obstructions: tuple[int, ...] = ()
    expansion_terms: int = 0

    @property
    def admissible(self) -> bool:
        return not self.obstructions

    def __float__(self) -> float:
        return float(self.value)


def _euler_factor_log(p: int, omega: int, k: int):
    return mpmath.log(1 - mpmath.mpf(omega) / p) - k * mpmath.log(1 - mpmath.mpf(1) / p)


def singular_series(
    t: KTuple,
    precision: float = 1e-15,
    truncation: int | None = None,
) -> SingularSeries:
    """C(a) = prod_p (1 - omega(p)/p) / (1 - 1/p)^k.

    ``precision`` is the target relative error; the result carries an explicit
    absolute ``tail_bound``.  Inadmissible tuples give exactly 0.
    """
    k = t.k
    prof = residue_profile(t)
    if not prof.admissible:
        return SingularSeries(t, mpmath.mpf(0), 0, 0.0, tuple(prof.obstructions), 0)

    P = max(truncation or DEFAULT_TRUNCATION, 2 * k + 1, t.width + 1)
    primes = [int(p) for p in simple_sieve(P)]
    P = primes[-1]  # the largest prime actually included

    # smallest J whose remainder beats the target
    target = precision * 1e-3
    J = 2
    while True:
        rem = k ** (J + 1) / (J * (J + 1) * (1 - k / P) * float(P) ** J)
        if rem < target or J > 200:
            break
        J += 1
    # P(j) - sum_{p<=P} p^-j loses about j*log10(P) digits to cancellation
    dps = 25 + int(J * math.log10(P)) + int(-math.log10(precision))
    with mpmath.workdps(dps):
        logc = mpmath.mpf(0)
        for p in primes:
            logc += _euler_factor_log(p, t.omega(p), k)
        for j in range(2, J + 1):
            partial = mpmath.fsum(mpmath.mpf(p) ** -j for p in primes)
            logc += mpmath.mpf(k - k**j) / j * (mpmath.primezeta(j) - partial)
        value = mpmath.exp(logc)
        err = rem + mpmath.mpf(10) ** (-(dps - 10))
        bound = float(value * mpmath.expm1(err))
    return SingularSeries(t, +value, P, bound, (), J)


def singular_series_crude(t: KTuple, P: int) -> tuple[float, float]:
    """Plain truncated product over p <= P with the crude relative tail bound.

    Returns (value, absolute tail bound).  Independent of the prime zeta route.
    """
    k = t.k
    prof = residue_profile(t)
    if not prof.admissible:
        return 0.0, 0.0
    if P <= max(2 * k, t.width):
        raise ContractError(f"truncation {P} must exceed max(2k, width)")
    primes = simple_sieve(P)
    # residues only matter for p <= width; beyond that omega = k
    small = primes[primes <= t.width]
    logs = [math.log1p(-t.omega(int(p)) / p) - k * math.log1p(-1 / p) for p in small]
    big = primes[primes > t.width].astype(np.float64)
    logs_big = np.log1p(-k / big) - k * np.log1p(-1 / big)
    total = math.fsum(logs) + math.fsum(logs_big.tolist())
    value = math.exp(total)
    return value, value * math.expm1(k * k / P)


def twin_shift_factor(h: int) -> float:
    """prod over odd p | h of (p-1)/(p-2)."""
    out = 1.0
    for p in simple_sieve(abs(h)):
        p = int(p)
        if p > 2 and h % p == 0:
            out *= (p - 1) / (p - 2)
    return out


# -- Selberg-Delange constants ------------------------------------------------


def selberg_delange_kappa(t: KTuple, which: str = "omega", truncation: int = 10**6) -> float:
    """Truncated Euler product kappa(g) = prod_p (sum_j g(p^j)/p^j)(1 - 1/p)^m.

    ``which="omega"``: g(n)/n = omega(n)/phi_omega(n) on squarefree n, m = k.
    ``which="omega_star"``: g(n)/n = omega*(n)/phi_omega(n), m = k - 1.
    Both should approach 1/C(a).
    """
    k = t.k
    if which == "omega":
        m = k
        num = lambda p, w: w  # noqa: E731
    elif which == "omega_star":
        m = k - 1
        num = lambda p, w: w - 1  # noqa: E731
    else:
        raise ContractError(f"unknown kappa instance {which!r}")
    primes = simple_sieve(truncation)
    logs = []
    for p in primes:
        p = int(p)
        w = t.omega(p) if p <= t.width else k
        if w >= p:
            raise ContractError(f"tuple is inadmissible at p={p}")
        local = 1 + num(p, w) / (p - w)
        logs.append(math.log(local) + m * math.log1p(-1 / p))
    return math.exp(math.fsum(logs))


# -- predictions --------------------------------------------------------------


def log_power_integral(x: float, k: int, lower: float = 2.0) -> float:
    """int_lower^x dt / (log t)^k, via t = e^u and adaptive Gauss-Kronrod."""
    if x <= lower:
        return 0.0
    a, b = math.log(lower), math.log(x)
    # e^u / u^k peaks at one end; split at u = k if inside the interval
    pts = [a] + ([float(k)] if a < k < b else []) + [b]
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        val, _ = integrate.quad(
            lambda u: math.exp(u - k * math.log(u)), lo, hi, epsabs=0.0, epsrel=1e-12, limit=200
        )
        total += val
    return total


@dataclass(frozen=True)
class Prediction:
    tuple: KTuple
    x: int
    constant: float
    actual: int
    pred_pow: float
    pred_integral: float

    @property
    def ratio(self) -> float:
        """actual / integral-model prediction (nan when the prediction is 0)."""
        return self.actual / self.pred_integral if self.pred_integral else float("nan")

    def row(self) -> dict:
        return {
            "x": self.x,
            "actual": self.actual,
            "pred_pow": self.pred_pow,
            "pred_integral": self.pred_integral,
            "ratio": self.ratio,
        }


def count_tuplets(t: KTuple, x: int, table: PrimeTable) -> int:
    """Number of n >= 1 with n + a_i all prime and n + a_k <= x."""
    if x > table.limit:
        raise OutOfRangeError(f"x={x} exceeds sieve limit {table.limit}")
    base = t.normalized()
    shift = t.offsets[0]
    top = x - t.offsets[-1]  # largest n
    if top < 1:
        return 0
    m = table.mask(x)
    ok = np.ones(top, dtype=bool)
    for a in t.offsets:
        lo = 1 + a
        if lo < 0:
            raise ContractError("offsets must keep n + a_i positive")
        ok &= m[lo : lo + top]
    del base, shift
    return int(ok.sum())


def predict_and_count(t: KTuple, x: int, table: PrimeTable) -> Prediction:
    C = float(singular_series(t).value)
    actual = count_tuplets(t, x, table)
    k = t.k
    pow_model = C * x / math.log(x) ** k if x > 1 else 0.0
    return Prediction(t, x, C, actual, pow_model, C * log_power_integral(x, k))


# -- circle method ----------------------------------------------------------------


def ramanujan_sum(m: int, k: int) -> int:
    """c_m(k) = mu(m/g) phi(m) / phi(m/g), g = (k, m).

    For squarefree m this is phi(g) mu(m/g).
    """
    if m < 1:
        raise ContractError("m must be >= 1")
    r = m // math.gcd(k, m)
    return _mu(r) * _phi(m) // _phi(r)


def ramanujan_sum_direct(m: int, k: int) -> complex:
    return sum(
        complex(math.cos(2 * math.pi * r * k / m), math.sin(2 * math.pi * r * k / m))
        for r in range(1, m + 1)
        if math.gcd(r, m) == 1
    )


def _phi(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def _mu(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def phi_mu_tables(M: int) -> tuple[np.ndarray, np.ndarray]:
    """(phi, mu) for 0..M by sieving over primes."""
    phi = np.arange(M + 1, dtype=np.int64)
    mu = np.ones(M + 1, dtype=np.int64)
    mu[0] = 0
    for p in simple_sieve(M):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
        mu[p::p] *= -1
        if p * p <= M:
            mu[p * p :: p * p] = 0
    return phi, mu


def circle_method_constant(h: int, M: int) -> float:
    """Partial sum over m <= M of mu(m)^2/phi(m)^2 * c_m(h)."""
    if h % 2:
        raise ContractError("h must be even")
    if M < 1:
        raise ContractError("M must be >= 1")
    phi, mu = phi_mu_tables(M)
    m = np.arange(1, M + 1, dtype=np.int64)
    sf = mu[1:] != 0
    m = m[sf]
    g = np.gcd(m, h)
    c = phi[g] * mu[m // g]
    terms = c / phi[m].astype(np.float64) ** 2
    return math.fsum(terms.tolist())
