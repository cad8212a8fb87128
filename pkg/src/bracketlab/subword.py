"""Factor counting and complexity-growth measurement for finite words.

``factor_count`` uses a 128-bit rolling hash with mandatory verification of
colliding pairs, so counts are exact.  ``complexity_curve`` batches all
window lengths at once: packed integer H-grams (vectorised) while they fit
in 62 bits, a suffix automaton otherwise.  Both agree with the naive
sorted-set count, which the tests enforce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DegenerateCurve, DomainError, FloorUndecidable, HTooLarge, TooShort
from .exactreal import AdaptiveReal, floor_certified
from .gp_core import BracketExpr, Coding, Word, generate_word

__all__ = [
    "ComplexityCurve",
    "GrowthFit",
    "ParametricCensus",
    "complexity_curve",
    "factor_count",
    "fit_growth",
    "minimal_period",
    "parametric_prefix_count",
]


# ---------------------------------------------------------------------------
# Exact factor counting

_HASH_P1 = (1 << 61) - 1
_HASH_P2 = (1 << 31) - 1
_HASH_B1 = 1_253_697_401_979_177_309
_HASH_B2 = 1_582_438_231


def factor_count(word: Word, H: int) -> int:
    """Number of distinct length-H blocks, exact.

    Rolling 128-bit hash (two independent moduli) buckets the positions;
    every position is verified against its bucket representative byte-wise,
    and genuine collisions open new bucket entries.
    """
    n = len(word)
    if H > n:
        raise HTooLarge(f"H={H} exceeds word length {n}")
    if H < 1:
        raise DomainError("H must be >= 1")
    codes = word.codes
    if len(word.alphabet) > 255:
        raise DomainError("factor counting supports alphabets up to 255 symbols")
    raw = codes.astype(np.uint8).tobytes()
    h1 = _rolling_hashes(codes, H, _HASH_B1, _HASH_P1)
    h2 = _rolling_hashes(codes, H, _HASH_B2, _HASH_P2)
    buckets: dict = {}
    count = 0
    for i in range(n - H + 1):
        key = (h1[i] << 31) | h2[i]
        entry = buckets.get(key)
        block = raw[i: i + H]
        if entry is None:
            buckets[key] = [block]
            count += 1
        else:
            for rep in entry:
                if rep == block:
                    break
            else:
                entry.append(block)  # verified hash collision
                count += 1
    return count


def _rolling_hashes(codes: np.ndarray, H: int, base: int, mod: int) -> list:
    n = len(codes)
    vals = [int(c) + 1 for c in codes]
    pre = [0] * (n + 1)
    acc = 0
    for i, v in enumerate(vals):
        acc = (acc * base + v) % mod
        pre[i + 1] = acc
    shift = pow(base, H, mod)
    return [(pre[i + H] - pre[i] * shift) % mod for i in range(n - H + 1)]


def _factor_count_naive(word: Word, H: int) -> int:
    raw = word.codes.astype(np.uint8).tobytes()
    return len({raw[i: i + H] for i in range(len(word) - H + 1)})


# ---------------------------------------------------------------------------
# Complexity curves


@dataclass(frozen=True)
class ComplexityCurve:
    """p(H) for H = 1..H_max on a declared finite prefix."""

    H_values: np.ndarray
    counts: np.ndarray
    prefix_length: int
    origin: dict

    def as_csv(self) -> str:
        lines = ["H,p"]
        for h, p in zip(self.H_values, self.counts):
            lines.append(f"{int(h)},{int(p)}")
        return "\n".join(lines) + "\n"


def complexity_curve(word: Word, H_max: int) -> ComplexityCurve:
    """p(H) for H = 1..H_max; exact, batched.

    Requires H_max <= len(word)/2 so every count is supported by at least
    half the prefix.
    """
    n = len(word)
    if H_max < 1 or H_max > n // 2:
        raise HTooLarge(f"H_max must lie in [1, {n // 2}] for a length-{n} prefix")
    bits = max(1, (len(word.alphabet) - 1).bit_length())
    if H_max * bits <= 62:
        counts = _counts_packed(word.codes, H_max, bits)
    else:
        counts = _counts_automaton(word.codes, H_max, len(word.alphabet))
    return ComplexityCurve(np.arange(1, H_max + 1), np.asarray(counts, dtype=np.int64),
                           n, dict(word.origin))


def _counts_packed(codes: np.ndarray, H_max: int, bits: int) -> list:
    vals = codes.astype(np.uint64)
    packed = vals.copy()
    counts = [int(len(np.unique(packed)))]
    for H in range(2, H_max + 1):
        packed = (packed[:-1] << np.uint64(bits)) | vals[H - 1:]
        counts.append(int(len(np.unique(packed))))
    return counts


def _counts_automaton(codes: np.ndarray, H_max: int, alphabet_size: int) -> list:
    link, length = _suffix_automaton(codes, alphabet_size)
    diff = [0] * (H_max + 2)
    for v in range(1, len(length)):
        lo = length[link[v]] + 1
        hi = length[v]
        if lo > H_max:
            continue
        diff[lo] += 1
        diff[min(hi, H_max) + 1] -= 1
    counts = []
    acc = 0
    for H in range(1, H_max + 1):
        acc += diff[H]
        counts.append(acc)
    return counts


def _suffix_automaton(codes: np.ndarray, alphabet_size: int):
    """Arrays (link, len); transitions array-backed for small alphabets."""
    small = alphabet_size <= 4
    if small:
        trans = [[-1] * alphabet_size]
    else:
        trans = [dict()]
    link = [-1]
    length = [0]
    last = 0
    if small:
        for ch in codes:
            ch = int(ch)
            cur = len(length)
            length.append(length[last] + 1)
            link.append(-1)
            trans.append([-1] * alphabet_size)
            p = last
            while p != -1 and trans[p][ch] == -1:
                trans[p][ch] = cur
                p = link[p]
            if p == -1:
                link[cur] = 0
            else:
                q = trans[p][ch]
                if length[p] + 1 == length[q]:
                    link[cur] = q
                else:
                    clone = len(length)
                    length.append(length[p] + 1)
                    link.append(link[q])
                    trans.append(trans[q][:])
                    while p != -1 and trans[p][ch] == q:
                        trans[p][ch] = clone
                        p = link[p]
                    link[q] = clone
                    link[cur] = clone
            last = cur
    else:
        for ch in codes:
            ch = int(ch)
            cur = len(length)
            length.append(length[last] + 1)
            link.append(-1)
            trans.append({})
            p = last
            while p != -1 and ch not in trans[p]:
                trans[p][ch] = cur
                p = link[p]
            if p == -1:
                link[cur] = 0
            else:
                q = trans[p][ch]
                if length[p] + 1 == length[q]:
                    link[cur] = q
                else:
                    clone = len(length)
                    length.append(length[p] + 1)
                    link.append(link[q])
                    trans.append(dict(trans[q]))
                    while p != -1 and trans[p].get(ch) == q:
                        trans[p][ch] = clone
                        p = link[p]
                    link[q] = clone
                    link[cur] = clone
            last = cur
    return link, length


def minimal_period(word: Word) -> int:
    """Smallest p with word[i] == word[i+p] for all valid i (classic doubling trick)."""
    raw = word.codes.astype(np.uint8).tobytes()
    shift = (raw + raw).find(raw, 1)
    return shift if shift > 0 else len(raw)


# ---------------------------------------------------------------------------
# Growth fits


@dataclass(frozen=True)
class GrowthFit:
    """Either p(H) ~ H^exponent (polynomial) or p(H) ~ exp(c*H^delta) (stretched)."""

    model: str  # "polynomial" | "stretched"
    exponent: float  # C for polynomial, delta for stretched
    constant: float
    residual: float  # RSS in log p space


def fit_growth(curve: ComplexityCurve) -> GrowthFit:
    """Least-squares model choice between polynomial and stretched-exponential.

    Both models are fitted in their linearising coordinates and compared by
    residual sum of squares on log p; the better one is returned.
    Raises :class:`DegenerateCurve` for constant curves, :class:`TooShort`
    below 4 points.
    """
    H = np.asarray(curve.H_values, dtype=np.float64)
    p = np.asarray(curve.counts, dtype=np.float64)
    if len(H) < 4:
        raise TooShort("growth fit needs at least 4 points")
    if np.all(p == p[0]):
        raise DegenerateCurve("constant complexity curve")
    logH = np.log(H)
    logp = np.log(p)
    c_poly, a_poly = np.polyfit(logH, logp, 1)
    rss_poly = float(np.sum((logp - (c_poly * logH + a_poly)) ** 2))
    mask = p >= 3
    best_stretch = None
    if int(np.count_nonzero(mask)) >= 4:
        llp = np.log(np.log(p[mask]))
        d_str, b_str = np.polyfit(logH[mask], llp, 1)
        pred_logp = np.exp(b_str) * H**d_str  # log p predicted by the stretched model
        rss_str = float(np.sum((logp - pred_logp) ** 2))
        best_stretch = (d_str, math.exp(b_str), rss_str)
    if best_stretch is not None and best_stretch[2] < rss_poly:
        return GrowthFit("stretched", float(best_stretch[0]), float(best_stretch[1]),
                         best_stretch[2])
    return GrowthFit("polynomial", float(c_poly), float(math.exp(a_poly)), rss_poly)


# ---------------------------------------------------------------------------
# Parametric prefix census


@dataclass(frozen=True)
class ParametricCensus:
    distinct: int
    skipped: int
    samples: int
    N: int
    degree: int
    seed: int

    def as_record(self) -> dict:
        """JSON-ready census record."""
        return {
            "record": "parametric_census",
            "distinct": self.distinct,
            "skipped": self.skipped,
            "samples": self.samples,
            "N": self.N,
            "degree": self.degree,
            "seed": self.seed,
        }


def parametric_prefix_count(expr: BracketExpr, coding: Optional[Coding], d: int,
                            N: int, samples: int, seed: int,
                            coeff_range: int = 4) -> ParametricCensus:
    """Distinct words (a(floor(p(n))))_{n<N} over random degree-<=d polynomials.

    Coefficients are uniform dyadic rationals in [0, coeff_range); every
    second sample scales them by sqrt(2) (the irrational preset).  Floors
    that cannot be certified skip the sample and are reported.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    rng = np.random.default_rng(seed)
    seen = set()
    skipped = 0
    denom = 1 << 20
    from .exactreal import sqrt as _sqrt

    root2 = _sqrt(2)
    for s in range(samples):
        raw = rng.integers(0, coeff_range * denom, size=d + 1)
        coeffs = [Fraction(int(r), denom) for r in raw]
        irrational = s % 2 == 1
        try:
            indices = _poly_floor_indices(coeffs, N, root2 if irrational else None)
            w = generate_word(expr, coding, indices, N)
            seen.add((w.alphabet, w.codes.tobytes()))
        except FloorUndecidable:
            skipped += 1
    return ParametricCensus(len(seen), skipped, samples, N, d, seed)


def _poly_floor_indices(coeffs, N: int, scale: Optional[AdaptiveReal]) -> np.ndarray:
    out = np.empty(N, dtype=np.int64)
    if scale is None:
        for n in range(N):
            acc = Fraction(0)
            for c in reversed(coeffs):
                acc = acc * n + c
            out[n] = acc.numerator // acc.denominator
        return out
    for n in range(N):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * n + c
        out[n] = floor_certified(scale * acc)
    return out
