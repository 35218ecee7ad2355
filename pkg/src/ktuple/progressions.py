"""Empirical equidistribution of primes in arithmetic progressions.

Theta(x; q, a) for all residues a of a modulus q comes from one bucketing pass
over the primes <= x.  To keep the buckets reproducible and essentially exact,
each log p is split as hi + lo with hi a multiple of 2^-20: partial sums of the
hi parts are exact in double precision (they stay far below 2^33), and the lo
parts are below 2^-21 each, so their rounding is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, OutOfRangeError, ResourceError
from .primes import PrimeTable, factorize, smallest_prime_factors

DEFAULT_WORK_BUDGET = 4 * 10**9
FILTERS = ("all", "smooth", "smooth-squarefree", "coprime-to")
_SPLIT = 2.0**20


@dataclass
class SmoothnessIndex:
    """Largest prime factor P(q) and squarefreeness for 1 <= q <= Q."""

    Q: int
    largest: np.ndarray
    squarefree: np.ndarray

    @classmethod
    def build(cls, Q: int) -> "SmoothnessIndex":
        spf = smallest_prime_factors(Q)
        P = np.ones(Q + 1, dtype=np.int64)
        sf = np.ones(Q + 1, dtype=bool)
        P[0] = 0
        sf[0] = False
        for q in range(2, Q + 1):
            p = int(spf[q])
            r = q // p
            P[q] = max(p, int(P[r]))
            sf[q] = sf[r] and r % p != 0
        return cls(Q, P, sf)

    def is_smooth(self, q: int, y: int) -> bool:
        return int(self.largest[q]) <= y


def euler_phi(q: int) -> int:
    out = q
    for p in factorize(q) if q > 1 else {}:
        out -= out // p
    return out


@dataclass(frozen=True)
class ScanRow:
    q: int
    largest_prime: int
    squarefree: bool
    max_error: float
    worst_a: int


@dataclass
class ErrorScan:
    x: int
    Q: int
    moduli_filter: str
    y: int | None = None
    fixed_a: int | None = None
    rows: list[ScanRow] = field(default_factory=list)
    partition_ok: bool = True

    @property
    def total(self) -> float:
        return math.fsum(r.max_error for r in self.rows)

    def csv_rows(self) -> list[dict]:
        return [
            {"q": r.q, "P(q)": r.largest_prime, "squarefree": int(r.squarefree), "maxE": r.max_error, "worst_a": r.worst_a}
            for r in self.rows
        ]


class ResidueBuckets:
    """Theta(x; q, a) for every a mod q from a single pass."""

    def __init__(self, table: PrimeTable, x: int):
        if x > table.limit:
            raise OutOfRangeError(f"x={x} exceeds sieve limit {table.limit}")
        n = table.pi(x)
        self.x = x
        self.primes = table.primes[:n]
        logs = table.logs[:n]
        self.hi = np.round(logs * _SPLIT) / _SPLIT
        self.lo = logs - self.hi
        self.theta = float(self.hi.sum()) + math.fsum(self.lo.tolist())

    def theta_all(self, q: int) -> np.ndarray:
        r = self.primes % q
        hi = np.bincount(r, weights=self.hi, minlength=q)
        lo = np.bincount(r, weights=self.lo, minlength=q)
        return hi + lo


def _passes(filt: str, q: int, idx: SmoothnessIndex, y: int | None, a: int | None) -> bool:
    if filt == "all":
        return True
    if filt == "smooth":
        return idx.is_smooth(q, y)
    if filt == "smooth-squarefree":
        return idx.is_smooth(q, y) and bool(idx.squarefree[q])
    if filt == "coprime-to":
        return math.gcd(q, a) == 1
    raise ContractError(f"unknown filter {filt!r}")


def bv_sum(
    x: int,
    Q: int,
    table: PrimeTable,
    moduli_filter: str = "all",
    y: int | None = None,
    fixed_a: int | None = None,
    work_budget: int = DEFAULT_WORK_BUDGET,
) -> tuple[float, ErrorScan]:
    """Sum over admitted q <= Q of max_{(a,q)=1} |Theta(x;q,a) - x/phi(q)|.

    With ``fixed_a`` the max is replaced by the single residue a (moduli not
    coprime to a are skipped).  ``y`` is the smoothness bound for the smooth
    filters, and the coprimality target for "coprime-to" falls back to fixed_a.
    """
    if Q < 1 or Q > x:
        raise ContractError(f"need 1 <= Q <= x, got Q={Q}, x={x}")
    if moduli_filter not in FILTERS:
        raise ContractError(f"unknown filter {moduli_filter!r}")
    if moduli_filter in ("smooth", "smooth-squarefree") and (y is None or y < 2):
        raise ContractError("smooth filters need y >= 2")
    cop = fixed_a if moduli_filter == "coprime-to" else None
    if moduli_filter == "coprime-to" and cop is None:
        raise ContractError("coprime-to filter needs fixed_a")
    n_primes = table.pi(min(x, table.limit)) if x <= table.limit else None
    if n_primes is None:
        raise OutOfRangeError(f"x={x} exceeds sieve limit {table.limit}")
    if Q * n_primes > work_budget:
        raise ResourceError(f"Q * pi(x) = {Q * n_primes} exceeds the work budget {work_budget}")

    idx = SmoothnessIndex.build(Q)
    buckets = ResidueBuckets(table, x)
    scan = ErrorScan(x, Q, moduli_filter, y, fixed_a)
    for q in range(1, Q + 1):
        if not _passes(moduli_filter, q, idx, y, cop):
            continue
        if fixed_a is not None and math.gcd(fixed_a, q) != 1:
            continue
        th = buckets.theta_all(q)
        if abs(math.fsum(th.tolist()) - buckets.theta) > 1e-9 * buckets.theta:
            scan.partition_ok = False
        main = x / euler_phi(q)
        if fixed_a is not None:
            a = fixed_a % q
            err, worst = abs(th[a] - main), fixed_a
        else:
            coprime = np.array([math.gcd(a, q) == 1 for a in range(q)])
            errs = np.where(coprime, np.abs(th - main), -1.0)
            worst = int(np.argmax(errs))
            err = float(errs[worst])
        scan.rows.append(ScanRow(q, int(idx.largest[q]), bool(idx.squarefree[q]), float(err), int(worst)))
    return scan.total, scan


def bv_default_Q(x: int) -> int:
    """Q = sqrt(x) / (log x)^2, floored, at least 1."""
    return max(1, int(math.sqrt(x) / math.log(x) ** 2))


def siegel_walfisz_probe(x: int, q: int, table: PrimeTable) -> float:
    """max over coprime a of |Theta(x;q,a) phi(q)/x - 1|, for q < (log x)^4."""
    if q < 1 or q >= math.log(x) ** 4:
        raise ContractError(f"q={q} outside the probe regime 1 <= q < (log x)^4")
    th = ResidueBuckets(table, x).theta_all(q)
    ph = euler_phi(q)
    return max(abs(th[a] * ph / x - 1) for a in range(q) if math.gcd(a, q) == 1)


def smooth_squarefree_moduli(Q: int, y: int) -> list[int]:
    if Q < 2 or y < 2:
        raise ContractError("need Q, y >= 2")
    idx = SmoothnessIndex.build(Q)
    return [q for q in range(1, Q + 1) if idx.squarefree[q] and idx.largest[q] <= y]


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in (factorize(n) if n > 1 else {}).items():
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def select_divisor(q: int, D: int) -> int:
    """Largest divisor of q that is <= D."""
    return max(d for d in divisors(q) if d <= D)
