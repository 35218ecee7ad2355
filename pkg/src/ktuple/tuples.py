"""Admissible k-tuples: checks, constructions and exhaustive narrowest search."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ContractError, PartialResultError, ResourceError
from .primes import PrimeTable, simple_sieve

# One published narrowest admissible 50-tuple (width 246).
TUPLE_50 = (
    0, 4, 6, 16, 30, 34, 36, 46, 48, 58, 60, 64, 70, 78, 84, 88, 90, 94, 100, 106,
    108, 114, 118, 126, 130, 136, 144, 148, 150, 156, 160, 168, 174, 178, 184,
    190, 196, 198, 204, 210, 214, 216, 220, 226, 228, 234, 238, 240, 244, 246,
)


@dataclass(frozen=True)
class KTuple:
    offsets: tuple[int, ...]

    def __post_init__(self):
        offs = tuple(int(a) for a in self.offsets)
        if not offs:
            raise ContractError("a tuple needs at least one offset")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ContractError(f"offsets must be strictly increasing: {offs}")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def of(cls, offsets: Iterable[int]) -> "KTuple":
        return cls(tuple(offsets))

    @classmethod
    def parse(cls, text: str) -> "KTuple":
        return cls(tuple(int(s) for s in text.replace(" ", "").split(",") if s))

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def width(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shifted(self, c: int) -> "KTuple":
        return KTuple(tuple(a + c for a in self.offsets))

    def normalized(self) -> "KTuple":
        return self.shifted(-self.offsets[0])

    def residues(self, p: int) -> set[int]:
        return {a % p for a in self.offsets}

    def omega(self, p: int) -> int:
        """Number of distinct residue classes occupied mod p."""
        return len(self.residues(p))

    def __iter__(self):
        return iter(self.offsets)

    def __len__(self) -> int:
        return self.k

    def __str__(self) -> str:
        return ",".join(map(str, self.offsets))


@dataclass(frozen=True)
class PrimeResidue:
    p: int
    omega: int
    avoided: int | None  # least residue class not hit, None at an obstruction


@dataclass(frozen=True)
class ResidueProfile:
    entries: tuple[PrimeResidue, ...]

    @property
    def obstructions(self) -> list[int]:
        return [e.p for e in self.entries if e.avoided is None]

    @property
    def admissible(self) -> bool:
        return not self.obstructions

    def as_dict(self) -> dict:
        return {str(e.p): {"omega": e.omega, "avoided": e.avoided} for e in self.entries}


def residue_profile(t: KTuple, primes: Sequence[int] | None = None) -> ResidueProfile:
    if primes is None:
        # a prime p > k cannot be covered by k offsets
        primes = [int(p) for p in simple_sieve(max(t.k, 2))]
    out = []
    for p in primes:
        res = t.residues(p)
        avoided = next((b for b in range(p) if b not in res), None)
        out.append(PrimeResidue(p, len(res), avoided))
    return ResidueProfile(tuple(out))


def is_admissible(t: KTuple) -> tuple[bool, ResidueProfile]:
    prof = residue_profile(t)
    return prof.admissible, prof


def delta_set(t: KTuple) -> list[int]:
    """Positive pairwise differences, sorted and deduplicated."""
    offs = t.offsets
    return sorted({b - a for i, a in enumerate(offs) for b in offs[i + 1 :]})


# -- constructions ------------------------------------------------------------


def _primes_above(k: int, count: int, table: PrimeTable) -> list[int]:
    ps = table.primes
    start = table.pi(min(k, table.limit))
    chosen = ps[start : start + count]
    if len(chosen) < count:
        raise ResourceError(
            f"prime table up to {table.limit} holds only {len(chosen)} primes above {k}, need {count}"
        )
    return [int(p) for p in chosen]


@dataclass(frozen=True)
class Construction:
    tuple: KTuple
    bound: float  # interval endpoint or width bound being checked
    fits: bool  # whether the tuple satisfies that bound
    note: str = ""
    extra: dict = field(default_factory=dict)


def first_primes_construction(k: int, table: PrimeTable) -> KTuple:
    """The first k primes greater than k; none of them is divisible by any p <= k."""
    if k < 1:
        raise ContractError("k must be >= 1")
    return KTuple(tuple(_primes_above(k, k, table)))


def width_constant(t: KTuple) -> float:
    """The C with width = k(log k + C), i.e. the a posteriori constant."""
    return t.width / t.k - math.log(t.k)


def primes_in_interval_construction(k: int, table: PrimeTable) -> Construction:
    """The k smallest primes above k, checked to lie in [1, 2k log k].

    Checks the counting inequality pi(2k log k) - pi(k) > k against the table.
    When it fails (small k) the tuple is kept and the interval widened to its
    last element; the result records the fallback.
    """
    if k < 2:
        raise ContractError("k must be >= 2")
    x = 2 * k * math.log(k)
    xi = math.floor(x)
    if xi > table.limit:
        raise ResourceError(f"need primes up to {xi}, table stops at {table.limit}")
    count = table.pi(xi) - table.pi(k)
    inequality = count > k
    t = KTuple(tuple(_primes_above(k, k, table)))
    fits = t.offsets[-1] <= x
    note = "" if fits else f"fallback: interval widened to [1, {t.offsets[-1]}]"
    return Construction(t, x, fits, note, {"count": count, "inequality_holds": inequality})


# -- narrowest search ---------------------------------------------------------


@dataclass
class SearchStats:
    nodes: int = 0
    widths_tried: list = field(default_factory=list)
    elapsed: float = 0.0


class _Timeout(Exception):
    pass


def _search_width(k: int, w: int, primes: list[int], deadline: float | None, stats: SearchStats):
    """Lexicographically smallest admissible tuple 0 = a1 < ... < ak = w, or None."""
    cover = {p: [0] * p for p in primes}
    filled = {p: 0 for p in primes}

    def add(x: int) -> bool:
        ok = True
        for p in primes:
            r = x % p
            c = cover[p]
            if c[r] == 0:
                filled[p] += 1
                if filled[p] == p:
                    ok = False
            c[r] += 1
        return ok

    def remove(x: int) -> None:
        for p in primes:
            r = x % p
            c = cover[p]
            c[r] -= 1
            if c[r] == 0:
                filled[p] -= 1

    chosen = [0]
    ok0 = add(0)
    ok1 = add(w)
    if not (ok0 and ok1):
        return None

    need = k - 2

    def dfs(last: int, left: int) -> bool:
        stats.nodes += 1
        if deadline is not None and (stats.nodes & 1023) == 0 and time.monotonic() > deadline:
            raise _Timeout
        if left == 0:
            return True
        # even slots strictly between last and w must hold the remaining offsets
        hi = w - 2 * left
        x = last + 2
        while x <= hi:
            if add(x):
                chosen.append(x)
                if dfs(x, left - 1):
                    return True
                chosen.pop()
            remove(x)
            x += 2
        return False

    if dfs(0, need):
        return KTuple(tuple(chosen) + (w,))
    return None


def narrowest_search(
    k: int,
    width_budget: int,
    witness: KTuple | None = None,
    time_limit: float | None = None,
    stats: SearchStats | None = None,
) -> KTuple | None:
    """Admissible k-tuple of minimal width <= width_budget, anchored at 0.

    Widths are tried in increasing order starting from the parity bound 2(k-1);
    the first hit at each width is the lexicographically smallest.  A known
    admissible ``witness`` caps the search: only narrower widths are explored and
    the witness is returned if none exists.  Exceeding ``time_limit`` seconds
    raises PartialResultError carrying the best tuple known so far.
    """
    if k < 2:
        raise ContractError("k must be >= 2")
    stats = stats if stats is not None else SearchStats()
    t0 = time.monotonic()
    deadline = None if time_limit is None else t0 + time_limit
    primes = [int(p) for p in simple_sieve(k)]
    best = None
    top = width_budget
    if witness is not None:
        if witness.k != k:
            raise ContractError(f"witness has {witness.k} offsets, expected {k}")
        ok, prof = is_admissible(witness)
        if not ok:
            raise ContractError(f"witness is not admissible (obstructions {prof.obstructions})")
        if witness.width <= width_budget:
            best = witness.normalized()
            top = witness.width - 1
    w = 2 * (k - 1)
    try:
        while w <= top:
            stats.widths_tried.append(w)
            hit = _search_width(k, w, primes, deadline, stats)
            if hit is not None:
                best = hit
                break
            w += 2
    except _Timeout:
        stats.elapsed = time.monotonic() - t0
        raise PartialResultError(
            f"time limit {time_limit}s reached while searching width {w}", best=best
        ) from None
    stats.elapsed = time.monotonic() - t0
    return best


def corollary_candidates(k: int, x: int) -> list[int]:
    """{n <= x : (n, R) = 1} with R the product of primes <= k."""
    R = math.prod(int(p) for p in simple_sieve(k))
    return [n for n in range(1, x + 1) if math.gcd(n, R) == 1]
