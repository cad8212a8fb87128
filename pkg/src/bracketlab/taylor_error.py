"""Floor-error profiles of growth functions against their window polynomials.

For a centre N, window H and model length ell, the profile records
``e_N(h) = floor(f(N+h)) - floor(P(h))`` where P is the certified Taylor
model of f at N.  Profiles are classified into a trichotomy:

* small-N -- the centre is below the threshold where the remainder bound
  can be pushed under the working epsilon;
* sparse -- few nonzero entries;
* structured -- the window splits into few arithmetic progressions with a
  common step on which the profile is constant.

A census over a range of centres counts distinct profiles, tallies the
classification and (over an H-grid) fits log(count) against H^eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, TooShort
from .exactreal import certified_cmp, certified_sign, floor_certified
from .hardy import HardyExpr, TaylorModel, eval_hardy, taylor_model, DEFAULT_T0

__all__ = [
    "Classification",
    "ErrorProfile",
    "ProfileCensus",
    "classify",
    "count_profiles",
    "error_profile",
    "monotonicity_changes",
]


# ---------------------------------------------------------------------------
# Profiles


@dataclass(frozen=True)
class ErrorProfile:
    """e_N on [H]: certified floor differences against the window polynomial."""

    center: int
    window: int
    order: int
    values: np.ndarray
    taylor: TaylorModel

    def support(self) -> np.ndarray:
        return np.nonzero(self.values)[0]

    def key(self) -> bytes:
        return self.values.tobytes()


def error_profile(f: HardyExpr, N: int, ell: int, H: int,
                  t0: int = DEFAULT_T0) -> ErrorProfile:
    """All H values of e_N, certified; raises FloorUndecidable with the h."""
    if ell < 1 or H < 1:
        raise DomainError("need ell >= 1 and H >= 1")
    tm = taylor_model(f, N, ell, H, t0=t0)
    vals = np.empty(H, dtype=np.int64)
    for h in range(H):
        fh = floor_certified(eval_hardy(f, N + h), (f"h={h}", "f(N+h)"))
        ph = floor_certified(tm.evaluate(h), (f"h={h}", "P(h)"))
        vals[h] = fh - ph
    return ErrorProfile(N, H, ell, vals, tm)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Classification:
    """Trichotomy outcome with the parameters that produced it.

    kind is one of "small_n", "sparse", "structured" or "sparse_overflow"
    (diagnostic: nothing fit under the caps; counts as a failure in
    experiments).  Structured progressions are (start, step, length, value)
    and partition [H].
    """

    kind: str
    eta: float
    epsilon: float
    threshold: float
    support: tuple = ()
    progressions: tuple = ()
    step: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.kind != "sparse_overflow"


def classify(profile: ErrorProfile, k: int, eta: float = 0.5,
             sparse_cap: float = 3.0, q_cap: int = 64,
             eta0: float = 0.1, threshold_const: float = 1.0,
             progression_cap: float = 3.0,
             weyl_hint: Optional[int] = None) -> Classification:
    """Classify a profile into the small-N / sparse / structured trichotomy.

    Small-N applies when N <= threshold_const * H^((ell+eta)/(ell-k)); sparse
    when the support has at most sparse_cap * H^eta entries; otherwise each
    step q <= q_cap is tried, splitting residue classes into maximal constant
    runs, and the best q wins if its progression count stays under
    progression_cap * H^eta.  ``weyl_hint`` (a promising step, e.g. from the
    structure dichotomy) is tried first and may exceed q_cap.
    """
    H, N, ell = profile.window, profile.center, profile.order
    if ell <= k:
        raise DomainError("classification requires ell > k")
    epsilon = float(H) ** (-eta0)
    threshold = threshold_const * float(H) ** ((ell + eta) / (ell - k))
    if N <= threshold:
        return Classification("small_n", eta, epsilon, threshold)
    support = tuple(int(i) for i in profile.support())
    if len(support) <= sparse_cap * float(H) ** eta:
        return Classification("sparse", eta, epsilon, threshold, support=support)
    candidates = list(range(1, q_cap + 1))
    if weyl_hint is not None and weyl_hint >= 1:
        candidates = [weyl_hint] + [q for q in candidates if q != weyl_hint]
    best_q, best_progs = None, None
    for q in candidates:
        progs = _constant_runs(profile.values, q)
        if best_progs is None or len(progs) < len(best_progs):
            best_q, best_progs = q, progs
    if len(best_progs) <= progression_cap * float(H) ** eta:
        return Classification("structured", eta, epsilon, threshold,
                              progressions=tuple(best_progs), step=best_q)
    return Classification("sparse_overflow", eta, epsilon, threshold, support=support)


def _constant_runs(values: np.ndarray, q: int) -> list:
    """Split every residue class mod q into maximal constant runs."""
    H = len(values)
    out = []
    for r in range(q):
        idx = range(r, H, q)
        start = None
        length = 0
        current = None
        for h in idx:
            v = int(values[h])
            if current is None or v != current:
                if length:
                    out.append((start, q, length, current))
                start, length, current = h, 1, v
            else:
                length += 1
        if length:
            out.append((start, q, length, current))
    return out


def reassemble(H: int, progressions: Sequence) -> np.ndarray:
    """Rebuild a profile from progressions; verifies they partition [H]."""
    vals = np.full(H, np.iinfo(np.int64).min, dtype=np.int64)
    seen = np.zeros(H, dtype=bool)
    for start, q, length, value in progressions:
        idx = start + q * np.arange(length)
        if np.any(seen[idx]):
            raise DomainError("progressions overlap")
        seen[idx] = True
        vals[idx] = value
    if not np.all(seen):
        raise DomainError("progressions do not cover [H]")
    return vals


# ---------------------------------------------------------------------------
# Census


@dataclass(frozen=True)
class HCensus:
    window: int
    distinct_count: int
    tally: dict
    records: tuple
    range_violations: int
    remainder_violations: int


@dataclass(frozen=True)
class ProfileCensus:
    """Distinct-profile counts and classification tallies over sampled centres."""

    per_window: dict
    fit: Optional[tuple]  # (slope, intercept) of log(count) vs H^eta
    params: dict


def count_profiles(f: HardyExpr, k: int, ell: int, H: Union[int, Sequence[int]],
                   N_range: tuple, stride: int = 1, eta: float = 0.5,
                   eta0: float = 0.1, sparse_cap: float = 3.0, q_cap: int = 64,
                   progression_cap: float = 3.0, t0: int = DEFAULT_T0,
                   check_remainder: bool = False) -> ProfileCensus:
    """Census of e_N over N in N_range (inclusive ends) at one or more windows.

    Per window: the number of distinct profiles, a classification tally and
    one record per centre.  ``range_violations`` counts profiles with values
    outside {-1,0,1} despite a remainder bound <= epsilon (always 0 when the
    certified bounds hold).  With ``check_remainder`` every |f(N+h) - P(h)|
    is verified against the Taylor bound (certified), counting violations.
    """
    if stride < 1:
        raise DomainError("stride must be >= 1")
    lo, hi = N_range
    windows = [H] if isinstance(H, int) else list(H)
    per = {}
    for w in windows:
        distinct = {}
        tally = {"small_n": 0, "sparse": 0, "structured": 0, "sparse_overflow": 0}
        records = []
        range_violations = 0
        remainder_violations = 0
        epsilon = float(w) ** (-eta0)
        for N in range(lo, hi + 1, stride):
            prof = error_profile(f, N, ell, w, t0=t0)
            distinct.setdefault(prof.key(), N)
            cls = classify(prof, k, eta=eta, sparse_cap=sparse_cap, q_cap=q_cap,
                           eta0=eta0, progression_cap=progression_cap)
            tally[cls.kind] += 1
            bound_le_eps = certified_cmp(prof.taylor.remainder_bound, Fraction(epsilon)) <= 0
            if bound_le_eps and np.any(np.abs(prof.values) > 1):
                range_violations += 1
            if check_remainder:
                remainder_violations += _remainder_violations(f, prof)
            rec = {"N": N, "class": cls.kind}
            if cls.kind in ("sparse", "sparse_overflow"):
                rec["support_size"] = len(cls.support)
            if cls.kind == "structured":
                rec["progression_count"] = len(cls.progressions)
                rec["q"] = cls.step
            records.append(rec)
        per[w] = HCensus(w, len(distinct), tally, tuple(records),
                         range_violations, remainder_violations)
    fit = None
    if len(windows) >= 2:
        xs = np.array([float(w) ** eta for w in windows])
        ys = np.array([np.log(max(per[w].distinct_count, 1)) for w in windows])
        slope, intercept = np.polyfit(xs, ys, 1)
        fit = (float(slope), float(intercept))
    params = {"k": k, "ell": ell, "eta": eta, "eta0": eta0,
              "sparse_cap": sparse_cap, "q_cap": q_cap,
              "progression_cap": progression_cap, "stride": stride,
              "N_range": [lo, hi], "windows": windows}
    return ProfileCensus(per, fit, params)


def _remainder_violations(f: HardyExpr, prof: ErrorProfile) -> int:
    bad = 0
    B = prof.taylor.remainder_bound
    for h in range(prof.window):
        diff = eval_hardy(f, prof.center + h) - prof.taylor.evaluate(h)
        if certified_sign(diff) < 0:
            diff = -diff
        if certified_cmp(diff, B) > 0:
            bad += 1
    return bad


def census_records(census: ProfileCensus):
    """Flatten a census into JSON-ready record dicts (one per centre + summaries)."""
    for w, hc in sorted(census.per_window.items()):
        for rec in hc.records:
            yield {"record": "profile", "H": w, **rec}
        yield {
            "record": "summary",
            "H": w,
            "distinct_profiles": hc.distinct_count,
            "tally": hc.tally,
            "range_violations": hc.range_violations,
            "remainder_violations": hc.remainder_violations,
            "params": census.params,
        }
    if census.fit is not None:
        yield {"record": "fit", "slope": census.fit[0], "intercept": census.fit[1]}


# ---------------------------------------------------------------------------
# Monotonicity


def monotonicity_changes(samples: Sequence) -> int:
    """Strict sign changes of consecutive differences; zero steps are skipped."""
    if len(samples) < 3:
        raise TooShort("need at least 3 samples")
    last = 0
    changes = 0
    for a, b in zip(samples, samples[1:]):
        d = 1 if b > a else (-1 if b < a else 0)
        if d == 0:
            continue
        if last != 0 and d != last:
            changes += 1
        last = d
    return changes
