"""Mobius function sieve and correlation experiments.

The sieve is segmented: each block records a sign from the primes up to
sqrt(limit) together with the product of those primes, and entries whose
tracked product falls short of the integer itself get one extra sign flip
for their single large prime factor.  Square divisibility zeroes the entry.

Correlation machinery: exact partial-sum averages of mu(n)*s(n) at
checkpoints, dyadic block averages, and the short-interval supremum over
arithmetic progressions computed per step from prefix extremes.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, EmptyInput, LimitExceeded, RegimeWarning

__all__ = [
    "CorrelationReport",
    "MobiusTable",
    "correlation",
    "decay_slope",
    "dyadic_averages",
    "load_table",
    "mertens",
    "mobius_range",
    "mobius_sieve",
    "save_table",
    "short_interval_sup",
    "squarefree_count",
]

SIEVE_LIMIT_CAP = 10**8
_BLOCK = 1 << 20
_MAGIC = b"MU01"


@dataclass(frozen=True)
class MobiusTable:
    """values[n] = mu(n) for 1 <= n <= limit; values[0] is unused (0)."""

    limit: int
    values: np.ndarray  # int8, length limit + 1

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"mu({n}) outside the sieved range [1, {self.limit}]")
        return int(self.values[n])


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def mobius_range(lo: int, hi: int, primes: Optional[np.ndarray] = None) -> np.ndarray:
    """mu on [lo, hi): one segmented block, exact."""
    if lo < 1:
        raise DomainError("range starts at 1")
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    prod = np.ones(size, dtype=np.int64)
    top = math.isqrt(max(hi - 1, 1))
    if primes is None:
        primes = _primes_upto(top)
    for p in primes:
        p = int(p)
        if p > top:
            break
        first = ((lo + p - 1) // p) * p - lo
        mu[first::p] *= -1
        prod[first::p] *= p
        p2 = p * p
        first2 = ((lo + p2 - 1) // p2) * p2 - lo
        mu[first2::p2] = 0
    ns = np.arange(lo, hi, dtype=np.int64)
    big_left = (prod != ns) & (mu != 0)
    mu[big_left] *= -1
    if lo == 1:
        mu[0] = 1
    return mu


def mobius_sieve(limit: int) -> MobiusTable:
    """Exact mu table for 1..limit (segmented; limit capped at 1e8)."""
    if limit > SIEVE_LIMIT_CAP:
        raise LimitExceeded(f"sieve limit {limit} above the cap of {SIEVE_LIMIT_CAP}")
    if limit < 1:
        raise DomainError("sieve limit must be >= 1")
    values = np.zeros(limit + 1, dtype=np.int8)
    primes = _primes_upto(math.isqrt(limit))
    lo = 1
    while lo <= limit:
        hi = min(lo + _BLOCK, limit + 1)
        values[lo:hi] = mobius_range(lo, hi, primes)
        lo = hi
    return MobiusTable(limit, values)


def mu_trial_division(n: int) -> int:
    """Independent oracle: factor by trial division."""
    if n < 1:
        raise DomainError("mu is defined on positive integers")
    count = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            count += 1
        d += 1 if d == 2 else 2
    if n > 1:
        count += 1
    return (-1) ** count


def mertens(table: MobiusTable, N: int) -> int:
    if N > table.limit:
        raise DomainError("checkpoint beyond the sieve limit")
    return int(table.values[1: N + 1].astype(np.int64).sum())


def squarefree_count(table: MobiusTable, N: int) -> int:
    if N > table.limit:
        raise DomainError("checkpoint beyond the sieve limit")
    return int(np.count_nonzero(table.values[1: N + 1]))


# ---------------------------------------------------------------------------
# Persistence: flat binary, magic "MU01", little-endian u64 limit, signed bytes


def save_table(table: MobiusTable, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.values[1:].tobytes())


def load_table(path: str) -> MobiusTable:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise DomainError(f"bad magic {magic!r}; expected {_MAGIC!r}")
        (limit,) = struct.unpack("<Q", fh.read(8))
        body = np.frombuffer(fh.read(limit), dtype=np.int8)
        if len(body) != limit:
            raise DomainError("truncated table body")
    values = np.zeros(limit + 1, dtype=np.int8)
    values[1:] = body
    return MobiusTable(int(limit), values)


# ---------------------------------------------------------------------------
# Correlations


@dataclass(frozen=True)
class CorrelationReport:
    """Partial-sum averages of mu(n)*s(n) at checkpoints plus optional
    dyadic block averages and short-interval records."""

    word_origin: dict
    checkpoints: tuple  # of (N, Fraction average, float average)
    dyadic: tuple = ()
    short_records: tuple = ()

    def as_csv(self) -> str:
        lines = ["N,avg"]
        for N, _, avg in self.checkpoints:
            lines.append(f"{N},{avg!r}")
        return "\n".join(lines) + "\n"


def correlation(s: Union[np.ndarray, Sequence], checkpoints: Sequence[int],
                table: MobiusTable, word_origin: Optional[dict] = None,
                with_dyadic: bool = False) -> CorrelationReport:
    """Averages (1/N) * sum_{n<=N} mu(n) s(n) at each checkpoint, exact for
    integer-valued s.

    ``s`` is aligned so that s[n-1] is the value at n; it must cover the
    largest checkpoint.
    """
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if not checkpoints:
        raise EmptyInput("no checkpoints")
    N_max = checkpoints[-1]
    if N_max > table.limit:
        raise DomainError("checkpoint beyond the sieve limit")
    arr = np.asarray(s)
    if len(arr) < N_max:
        raise DomainError("sequence shorter than the largest checkpoint")
    mu = table.values[1: N_max + 1].astype(np.int64)
    integral = np.issubdtype(arr.dtype, np.integer)
    prods = mu * arr[:N_max].astype(np.int64 if integral else np.float64)
    sums = np.cumsum(prods)
    cps = []
    for N in checkpoints:
        total = sums[N - 1]
        if integral:
            cps.append((N, Fraction(int(total), N), int(total) / N))
        else:
            cps.append((N, Fraction(float(total) / N).limit_denominator(10**15),
                        float(total) / N))
    dyd = ()
    if with_dyadic:
        dyd = tuple(dyadic_averages(arr, table, N_max))
    return CorrelationReport(word_origin or {}, tuple(cps), dyd)


def dyadic_averages(s: Union[np.ndarray, Sequence], table: MobiusTable,
                    N_max: int) -> list:
    """Per-block averages over [N, 2N) for N = 1, 2, 4, ... below N_max."""
    arr = np.asarray(s)
    out = []
    N = 1
    while 2 * N <= N_max:
        mu = table.values[N: 2 * N].astype(np.int64)
        block = arr[N - 1: 2 * N - 1]
        avg = float((mu * block).sum()) / N
        out.append((N, avg))
        N *= 2
    return out


def short_interval_sup(s: Union[np.ndarray, Sequence], N: int, H: int,
                       q_max: int, table: MobiusTable) -> float:
    """sup over arithmetic progressions P of |E_{h<H} 1_P(h) mu(N+h) s(h)|.

    For each step q <= q_max and residue r, the maximum over contiguous
    sub-progressions is (max prefix - min prefix) of the partial sums along
    the class, all divided by H; total work O(H * q_max).
    """
    if H < 1:
        raise DomainError("H must be >= 1")
    if H > N:
        raise DomainError("the short-interval regime needs H <= N")
    if N + H - 1 > table.limit:
        raise DomainError("window beyond the sieve limit")
    if float(H) < float(N) ** 0.626:
        warnings.warn(
            f"H={H} below N^0.626={N**0.626:.0f}: outside the short-interval regime",
            RegimeWarning,
            stacklevel=2,
        )
    arr = np.asarray(s, dtype=np.float64)
    if len(arr) < H:
        raise DomainError("window values shorter than H")
    mu = table.values[N: N + H].astype(np.float64)
    prod = mu * arr[:H]
    best = 0.0
    for q in range(1, q_max + 1):
        for r in range(q):
            cls = prod[r::q]
            if len(cls) == 0:
                continue
            prefix = np.concatenate(([0.0], np.cumsum(cls)))
            spread = float(prefix.max() - prefix.min())
            if spread > best:
                best = spread
    return best / H


def short_interval_sup_brute(s, N: int, H: int, table: MobiusTable) -> float:
    """Quadratic oracle at q = 1: enumerate every contiguous interval."""
    arr = np.asarray(s, dtype=np.float64)
    mu = table.values[N: N + H].astype(np.float64)
    prod = mu * arr[:H]
    best = 0.0
    for a in range(H):
        acc = 0.0
        for b in range(a, H):
            acc += prod[b]
            if abs(acc) > best:
                best = abs(acc)
    return best / H


def decay_slope(checkpoints: Sequence) -> float:
    """Least-squares slope of log|avg| against log N (zero averages skipped)."""
    xs, ys = [], []
    for N, _, avg in checkpoints:
        if avg != 0:
            xs.append(math.log(N))
            ys.append(math.log(abs(avg)))
    if len(xs) < 2:
        raise EmptyInput("not enough nonzero averages for a slope")
    slope, _ = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(slope)
