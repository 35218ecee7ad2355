"""Segmented prime sieve, Chebyshev theta sums and the on-disk prime cache.

The table stores one flag per odd integer (index ``i`` stands for ``2*i + 1``),
set when the number is composite.  Sieving walks the odd range in blocks of
``block_size`` flags so that memory traffic per block stays cache sized.

Cache files are little-endian::

    magic  b"KTLPRIME"   8 bytes
    version              u32
    limit                u64
    block_size           u32
    bitset               ceil(((limit + 1) // 2) / 8) bytes, bit i = flag of 2i+1 (LSB first)
"""

from __future__ import annotations

import logging
import math
import os
import re
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError, OutOfRangeError, ResourceError

log = logging.getLogger(__name__)

MAGIC = b"KTLPRIME"
FORMAT_VERSION = 1
HEADER = struct.Struct("<8sIQI")
DEFAULT_BLOCK_SIZE = 1 << 20
DEFAULT_MEMORY_BUDGET = 2 << 30
_CACHE_NAME = re.compile(r"^primes-v(\d+)-(\d+)\.bin$")


def simple_sieve(n: int) -> np.ndarray:
    """All primes <= n as int64, by a plain (unsegmented) Eratosthenes sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def smallest_prime_factors(n: int) -> np.ndarray:
    """spf[m] = smallest prime factor of m for 2 <= m <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 2:
        spf[2::2] = 2
    for p in range(3, n + 1, 2):
        if spf[p] == 0:
            spf[p] = p
            if p * p <= n:
                seg = spf[p * p :: 2 * p]
                seg[seg == 0] = p
    return spf


def factorize(m: int, spf: np.ndarray | None = None) -> dict[int, int]:
    """Prime factorization {p: e}; uses an spf table when m is inside it."""
    out: dict[int, int] = {}
    if m < 1:
        raise ContractError(f"cannot factor {m}")
    if spf is not None and m < len(spf):
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
        return out
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out[d] = e
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _odd_count(limit: int) -> int:
    # number of odd integers in [1, limit]
    return (limit + 1) // 2


def estimate_bytes(limit: int) -> int:
    """Rough resident size of a table: flag array plus prime and log arrays."""
    flags = _odd_count(limit)
    n_primes = int(1.3 * limit / math.log(limit)) + 16 if limit > 10 else 16
    return flags + 16 * n_primes


def _sieve_block(flags: np.ndarray, lo: int, hi: int, base: np.ndarray) -> None:
    """Mark odd composites with index in [lo, hi) of ``flags``."""
    n_lo = 2 * lo + 1
    n_hi = 2 * hi - 1
    view = flags[lo:hi]
    for p in base:
        p = int(p)
        pp = p * p
        if pp > n_hi:
            break
        start = max(pp, -(-n_lo // p) * p)
        if start % 2 == 0:
            start += p
        if start > n_hi:
            continue
        view[(start - 1) // 2 - lo :: p] = True


@dataclass
class PrimeTable:
    """Primality flags for every n <= limit, with derived prime and log arrays."""

    limit: int
    block_size: int
    composite: np.ndarray = field(repr=False)
    _primes: np.ndarray | None = field(default=None, repr=False)
    _logs: np.ndarray | None = field(default=None, repr=False)

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            odd = 2 * np.flatnonzero(~self.composite).astype(np.int64) + 1
            head = np.array([2], dtype=np.int64) if self.limit >= 2 else np.zeros(0, np.int64)
            self._primes = np.concatenate([head, odd])
        return self._primes

    @property
    def logs(self) -> np.ndarray:
        if self._logs is None:
            self._logs = np.log(self.primes.astype(np.float64))
        return self._logs

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise OutOfRangeError(f"{n} exceeds sieve limit {self.limit}")
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        return not bool(self.composite[(n - 1) // 2])

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        if x > self.limit:
            raise OutOfRangeError(f"{x} exceeds sieve limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes[: self.pi(x)]

    def mask(self, upto: int | None = None) -> np.ndarray:
        """Boolean array m with m[n] True iff n is prime, for 0 <= n <= upto."""
        upto = self.limit if upto is None else upto
        if upto > self.limit:
            raise OutOfRangeError(f"{upto} exceeds sieve limit {self.limit}")
        m = np.zeros(upto + 1, dtype=bool)
        m[self.primes_upto(upto)] = True
        return m

    def truncated(self, limit: int) -> "PrimeTable":
        if limit > self.limit:
            raise OutOfRangeError(f"{limit} exceeds sieve limit {self.limit}")
        return PrimeTable(limit, self.block_size, self.composite[: _odd_count(limit)].copy())

    # -- persistence -------------------------------------------------------

    def save(self, path: str | os.PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "wb") as fh:
            fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, self.limit, self.block_size))
            fh.write(np.packbits(self.composite, bitorder="little").tobytes())
        os.replace(tmp, path)
        return path

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PrimeTable":
        with open(path, "rb") as fh:
            raw = fh.read(HEADER.size)
            if len(raw) != HEADER.size:
                raise ContractError(f"{path}: truncated header")
            magic, version, limit, block_size = HEADER.unpack(raw)
            if magic != MAGIC:
                raise ContractError(f"{path}: bad magic {magic!r}")
            if version != FORMAT_VERSION:
                raise ContractError(f"{path}: unsupported cache version {version}")
            n = _odd_count(limit)
            data = np.frombuffer(fh.read(), dtype=np.uint8)
        if len(data) * 8 < n:
            raise ContractError(f"{path}: bitset shorter than header limit {limit}")
        bits = np.unpackbits(data, bitorder="little", count=n).astype(bool)
        return cls(int(limit), int(block_size), bits)


def _cache_file(cache_dir: Path, limit: int) -> Path:
    return cache_dir / f"primes-v{FORMAT_VERSION}-{limit}.bin"


def _cached_limits(cache_dir: Path) -> list[int]:
    if not cache_dir.is_dir():
        return []
    out = []
    for entry in cache_dir.iterdir():
        m = _CACHE_NAME.match(entry.name)
        if m and int(m.group(1)) == FORMAT_VERSION:
            out.append(int(m.group(2)))
    return sorted(out)


def _extend(flags_prefix: np.ndarray, limit: int, block_size: int, workers: int) -> np.ndarray:
    n = _odd_count(limit)
    flags = np.zeros(n, dtype=bool)
    done = len(flags_prefix)
    flags[:done] = flags_prefix
    base = simple_sieve(math.isqrt(limit))[1:]  # odd base primes
    blocks = [(lo, min(lo + block_size, n)) for lo in range(done, n, block_size)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: _sieve_block(flags, b[0], b[1], base), blocks))
    else:
        for lo, hi in blocks:
            _sieve_block(flags, lo, hi, base)
    if n:
        flags[0] = True  # 1 is not prime
    return flags


def sieve(
    limit: int,
    cache_dir: str | os.PathLike | None = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    workers: int = 1,
) -> PrimeTable:
    """Sieve all primes <= limit, reusing or extending a cached table when available."""
    if limit < 2:
        raise ContractError(f"sieve limit must be >= 2, got {limit}")
    if block_size < 8:
        raise ContractError("block_size must be at least 8")
    need = estimate_bytes(limit)
    if need > memory_budget:
        raise ResourceError(
            f"sieve to {limit} needs about {need} bytes, over the memory budget of {memory_budget} bytes"
        )

    cdir = Path(cache_dir) if cache_dir is not None else None
    prefix = np.zeros(0, dtype=bool)
    if cdir is not None:
        limits = _cached_limits(cdir)
        larger = [L for L in limits if L >= limit]
        if larger:
            log.debug("reusing cached table up to %d", larger[0])
            return PrimeTable.load(_cache_file(cdir, larger[0])).truncated(limit)
        if limits:
            old = PrimeTable.load(_cache_file(cdir, limits[-1]))
            log.debug("extending cached table from %d to %d", old.limit, limit)
            prefix = old.composite

    table = PrimeTable(limit, block_size, _extend(prefix, limit, block_size, workers))
    if cdir is not None:
        table.save(_cache_file(cdir, limit))
    return table


@dataclass(frozen=True)
class ChebyshevSum:
    x: int
    value: float


def _check_range(table: PrimeTable, x: int) -> None:
    if x > table.limit:
        raise OutOfRangeError(f"x={x} exceeds sieve limit {table.limit}")


def theta(table: PrimeTable, x: int) -> float:
    """Sum of log p over primes p <= x (correctly rounded via math.fsum)."""
    _check_range(table, x)
    if x < 2:
        return 0.0
    return math.fsum(table.logs[: table.pi(x)])


def chebyshev(table: PrimeTable, x: int) -> ChebyshevSum:
    return ChebyshevSum(x, theta(table, x))


def theta_progression(table: PrimeTable, x: int, q: int, a: int) -> float:
    """Sum of log p over primes p <= x with p = a (mod q)."""
    _check_range(table, x)
    if q < 1:
        raise ContractError(f"modulus must be >= 1, got {q}")
    if x < 2:
        return 0.0
    n = table.pi(x)
    sel = (table.primes[:n] % q) == (a % q)
    return math.fsum(table.logs[:n][sel])
