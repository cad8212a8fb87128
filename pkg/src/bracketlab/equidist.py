"""Exact discrepancy, the structure dichotomy for polynomials mod 1, and
polynomial sublevel-set measure estimation on the unit box.

The discrepancy here is the two-sided (extreme) one: the worst deviation of
empirical interval counts from interval length over all half-open
subintervals of [0,1).  After sorting, the supremum is attained in the limit
at interval endpoints drawn from the sample values and their left limits
together with {0, 1}, which gives an exact O(N log N) algorithm.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetTooSmall, DomainError, EmptyInput, ZeroPolynomial
from .exactreal import AdaptiveReal, certified_cmp, floor_certified

__all__ = [
    "BoxPolynomial",
    "DiscrepancyReport",
    "SublevelReport",
    "WeylReport",
    "coefficient_sup_equivalence",
    "discrepancy",
    "discrepancy_brute_force",
    "distance_to_integer",
    "sublevel_measure",
    "weyl_dichotomy",
]


# ---------------------------------------------------------------------------
# Discrepancy


@dataclass(frozen=True)
class DiscrepancyReport:
    """Extreme discrepancy with a witness interval attaining it (in the limit).

    ``kind`` records whether the witness over- or under-fills: "overfill"
    witnesses are [alpha, beta+) limits, "underfill" witnesses (alpha+, beta).
    """

    value: float
    witness: tuple
    count: int
    kind: str


def discrepancy(points: Sequence) -> DiscrepancyReport:
    """Exact extreme discrepancy of a finite point set mod 1.

    Works verbatim on floats or Fractions (comparisons and subtraction only),
    so tests can demand exact equality against the brute-force oracle.
    """
    n = len(points)
    if n == 0:
        raise EmptyInput("discrepancy of an empty point set")
    pts = sorted(_mod1(x) for x in points)
    zero, one = _like(pts[0], 0), _like(pts[0], 1)
    values: list = []
    counts: list = []
    for x in pts:
        if values and values[-1] == x:
            counts[-1] += 1
        else:
            values.append(x)
            counts.append(1)
    m = len(values)
    le = [0] * m  # points <= values[i]
    acc = 0
    for i in range(m):
        acc += counts[i]
        le[i] = acc
    lt = [le[i] - counts[i] for i in range(m)]

    best = None  # (value, alpha, beta, kind)
    # Overfill: [v_i, v_j + eps): count le[j] - lt[i], length -> v_j - v_i,
    # i.e. le[j]/n - v_j + max_{i<=j} (v_i - lt[i]/n), kept as a running max.
    run_best = None
    run_arg = None
    for j in range(m):
        cand = values[j] - _ratio(lt[j], n, zero)
        if run_best is None or cand > run_best:
            run_best, run_arg = cand, j
        val = _ratio(le[j], n, zero) - values[j] + run_best
        if best is None or val > best[0]:
            best = (val, values[run_arg], values[j], "overfill")
    # Underfill: (v_i + eps, v_j): count lt[j] - le[i], with sentinels 0 and 1.
    svals = [zero] + values + [one]
    sle = [0] + le + [le[-1]]
    slt = [0] + lt + [n]
    run_best = None
    run_arg = None
    for j in range(len(svals)):
        if j > 0:
            val = svals[j] - _ratio(slt[j], n, zero) + run_best
            if val > best[0]:
                best = (val, svals[run_arg], svals[j], "underfill")
        cand = _ratio(sle[j], n, zero) - svals[j]
        if run_best is None or cand > run_best:
            run_best, run_arg = cand, j
    value, alpha, beta, kind = best
    if value < 0:  # degenerate only for pathological inputs; clamp at zero
        value, alpha, beta, kind = zero, zero, zero, "overfill"
    return DiscrepancyReport(value, (alpha, beta), n, kind)


def _mod1(x):
    if isinstance(x, Fraction):
        return x - (x.numerator // x.denominator)
    return x - math.floor(x)


def _like(template, i: int):
    return Fraction(i) if isinstance(template, Fraction) else float(i)


def _ratio(num: int, den: int, template):
    return Fraction(num, den) if isinstance(template, Fraction) else num / den


def discrepancy_brute_force(points: Sequence) -> float:
    """Independent oracle: enumerate every endpoint-pair interval.

    Candidate endpoints are the sample values, their left limits, and {0, 1};
    counts come from binary search.  Exact on Fractions.
    """
    n = len(points)
    if n == 0:
        raise EmptyInput("discrepancy of an empty point set")
    pts = sorted(_mod1(x) for x in points)
    zero, one = _like(pts[0], 0), _like(pts[0], 1)
    cands = sorted(set(pts) | {zero, one})
    best = zero
    for i, a in enumerate(cands):
        for a_open in (False, True):  # alpha = a (closed) or a+ (left limit)
            for b in cands[i:]:
                for b_open in (False, True):  # beta = b or b+
                    lo = bisect_right(pts, a) if a_open else bisect_left(pts, a)
                    hi = bisect_right(pts, b) if b_open else bisect_left(pts, b)
                    if hi < lo:
                        continue
                    count = hi - lo
                    length = b - a
                    dev = _ratio(count, n, zero) - length
                    if dev < 0:
                        dev = -dev
                    if dev > best:
                        best = dev
    return best


# ---------------------------------------------------------------------------
# Weyl structure dichotomy


@dataclass(frozen=True)
class WeylReport:
    """Either the orbit is delta-equidistributed or a small multiple of the
    coefficients is close to integers; defects[j] estimates N^j * ||l*beta_j||."""

    branch: str  # "equidistributed" | "structured"
    delta: float
    degree: int
    coefficients: tuple
    discrepancy_value: float
    ell: Optional[int] = None
    defects: Optional[dict] = None


def distance_to_integer(x: AdaptiveReal) -> Fraction:
    """Certified ||x||: distance to the nearest integer; ties report 1/2."""
    m = floor_certified(x)
    fr = x - m
    # compare fractional part against 1/2 exactly where possible
    c = certified_cmp(fr, Fraction(1, 2))
    if c == 0:
        return Fraction(1, 2)
    if c < 0:
        return _upper_fraction(fr)
    return _upper_fraction(AdaptiveReal(1) - fr)


def _upper_fraction(x: AdaptiveReal) -> Fraction:
    ex = x.exact_value
    if isinstance(ex, Fraction):
        return ex
    return x.upper


def _coerce_real(c) -> AdaptiveReal:
    if isinstance(c, AdaptiveReal):
        return c
    if isinstance(c, (int, Fraction)):
        return AdaptiveReal(c)
    if isinstance(c, str):
        from .gp_core import _as_const_expr, eval_gp

        return eval_gp(_as_const_expr(c), 0)
    raise DomainError(f"cannot read {c!r} as a constant")


def weyl_dichotomy(beta: Sequence, N: int, delta: float, ell_cap: int = 10_000) -> WeylReport:
    """Evaluate the dichotomy for g(n) = beta_0 + n beta_1 + ... + n^d beta_d.

    Computes the discrepancy of (g(n) mod 1) for n < N; below delta the
    orbit is reported equidistributed, otherwise the integer l <= ell_cap
    minimising max_{1<=j<=d} N^j ||l beta_j|| is reported with its defect
    table.  The constant term is never constrained.
    """
    if not 0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    if ell_cap < 1:
        raise DomainError("ell_cap must be >= 1")
    coeffs = [_coerce_real(c) for c in beta]
    d = len(coeffs) - 1
    if d > 10:
        raise DomainError("degree cap is 10")
    pts = _poly_orbit_mod1(coeffs, N)
    rep = discrepancy(pts)
    dval = float(rep.value)
    if dval < delta:
        return WeylReport("equidistributed", delta, d, tuple(coeffs), dval)
    best_ell, best_defects, best_score = None, None, None
    for ell in range(1, ell_cap + 1):
        defects = {}
        score = 0.0
        for j in range(1, d + 1):
            dist = distance_to_integer(coeffs[j] * ell)
            defect = float(dist) * float(N) ** j
            defects[j] = defect
            score = max(score, defect)
        if best_score is None or score < best_score:
            best_ell, best_defects, best_score = ell, defects, score
        if best_score == 0.0:
            break
    return WeylReport("structured", delta, d, tuple(coeffs), dval, best_ell, best_defects)


def _poly_orbit_mod1(coeffs, N: int) -> list:
    out = []
    exacts = [c.exact_value for c in coeffs]
    if all(isinstance(e, Fraction) for e in exacts):
        for n in range(N):
            acc = Fraction(0)
            for e in reversed(exacts):
                acc = acc * n + e
            out.append(acc - (acc.numerator // acc.denominator))
        return [float(x) for x in out]
    for n in range(N):
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * n + c
        m = floor_certified(acc)
        out.append(float(acc.midpoint_float() - m))
    return out


# ---------------------------------------------------------------------------
# Polynomials on the unit box and sublevel measures


@dataclass(frozen=True)
class BoxPolynomial:
    """Dense polynomial on [0,1)^D given by {multidegree: coefficient}."""

    dims: int
    coeffs: tuple  # of (exponent tuple, Fraction)

    @staticmethod
    def from_table(table, dims: Optional[int] = None) -> "BoxPolynomial":
        """Accepts {exps: coeff} or nested coefficient lists (index = degree)."""
        if isinstance(table, dict):
            items = {tuple(k): Fraction(v) for k, v in table.items()}
            if dims is None:
                dims = len(next(iter(items))) if items else 1
        else:
            items = {}

            def walk(node, prefix):
                if isinstance(node, (list, tuple)):
                    for i, sub in enumerate(node):
                        walk(sub, prefix + (i,))
                else:
                    if node:
                        items[prefix] = Fraction(node)

            walk(table, ())
            if dims is None:
                dims = len(next(iter(items))) if items else 1
        clean = tuple(sorted((k, v) for k, v in items.items() if v != 0))
        for exps, _ in clean:
            if len(exps) != dims:
                raise DomainError("inconsistent multidegree arity")
        return BoxPolynomial(dims, clean)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.coeffs), default=0)

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for _, c in self.coeffs), default=Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def eval_float(self, *axes: np.ndarray) -> np.ndarray:
        if len(axes) != self.dims:
            raise DomainError("wrong number of coordinate arrays")
        out = np.zeros(np.broadcast(*axes).shape if self.dims > 1 else np.shape(axes[0]))
        for exps, c in self.coeffs:
            term = float(c)
            for x, e in zip(axes, exps):
                if e:
                    term = term * x**e
            out = out + term
        return out

    def scaled(self, factor: Fraction) -> "BoxPolynomial":
        return BoxPolynomial(self.dims, tuple((e, c * Fraction(factor)) for e, c in self.coeffs))


@dataclass(frozen=True)
class SublevelReport:
    polynomial: BoxPolynomial
    epsilon: float
    measure: float
    method: str
    error_bar: float
    cells_used: int = 0


def _check_poly(P: BoxPolynomial):
    if P.dims > 3:
        raise DomainError("sublevel estimation supports up to 3 dimensions")
    if P.degree > 8:
        raise DomainError("sublevel estimation supports degree up to 8")


def sublevel_measure(P: BoxPolynomial, eps, method: str = "grid",
                     budget: int = 1 << 18, rng: Optional[np.random.Generator] = None
                     ) -> SublevelReport:
    """Measure of {x in [0,1)^D : |P(x)| < eps}.

    grid: adaptive dyadic subdivision classifying cells by interval
    evaluation (inside / outside / boundary); the estimate is the inside
    mass plus half the boundary mass and the error bar is the boundary mass.
    montecarlo: ``budget`` uniform samples from the caller's seeded
    generator with a 95% binomial error bar.
    """
    _check_poly(P)
    epsf = float(eps)
    if epsf <= 0:
        raise DomainError("eps must be positive")
    if method == "grid":
        return _sublevel_grid(P, epsf, budget)
    if method == "montecarlo":
        if rng is None:
            raise DomainError("montecarlo requires an explicit seeded generator")
        return _sublevel_mc(P, epsf, budget, rng)
    raise DomainError(f"unknown method {method!r}")


def _sublevel_grid(P: BoxPolynomial, eps: float, budget: int) -> SublevelReport:
    D = P.dims
    # Interval evaluation on [0,1)^D cells is monotone per axis since
    # coordinates are non-negative; a tiny rigid margin absorbs float rounding.
    margin = 1e-12 * float(sum(abs(c) for _, c in P.coeffs) + 1)
    level = 2
    corners = _grid_corners(D, level)
    size = 0.5**level
    inside_mass = 0.0
    used = len(corners)
    while True:
        lo_vals, hi_vals = _interval_eval(P, corners, size)
        abs_lo = np.where(lo_vals > 0, lo_vals, np.where(hi_vals < 0, -hi_vals, 0.0))
        abs_hi = np.maximum(np.abs(lo_vals), np.abs(hi_vals))
        inside = abs_hi + margin < eps
        outside = abs_lo - margin >= eps
        boundary = ~(inside | outside)
        vol = size**D
        inside_mass += float(np.count_nonzero(inside)) * vol
        b_idx = np.nonzero(boundary)[0]
        boundary_mass = float(len(b_idx)) * vol
        if len(b_idx) == 0 or used + len(b_idx) * (1 << D) > budget or size < 2**-40:
            if boundary_mass > 0.5:
                raise BudgetTooSmall(
                    f"boundary mass {boundary_mass:.3f} > 0.5 at budget {budget}"
                )
            return SublevelReport(P, eps, inside_mass + boundary_mass / 2,
                                  "grid", boundary_mass, used)
        corners = _split_cells(corners[b_idx], size, D)
        size /= 2
        used += len(corners)


def _grid_corners(D: int, level: int) -> np.ndarray:
    side = np.arange(1 << level) / (1 << level)
    grids = np.meshgrid(*([side] * D), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _split_cells(corners: np.ndarray, size: float, D: int) -> np.ndarray:
    half = size / 2
    offsets = _grid_corners(D, 1) * size
    out = corners[:, None, :] + offsets[None, :, :]
    return out.reshape(-1, D)


def _interval_eval(P: BoxPolynomial, corners: np.ndarray, size: float):
    lo = np.zeros(len(corners))
    hi = np.zeros(len(corners))
    for exps, c in P.coeffs:
        mono_lo = np.ones(len(corners))
        mono_hi = np.ones(len(corners))
        for axis, e in enumerate(exps):
            if e:
                a = corners[:, axis]
                b = np.minimum(a + size, 1.0)
                mono_lo = mono_lo * a**e
                mono_hi = mono_hi * b**e
        cf = float(c)
        if cf >= 0:
            lo += cf * mono_lo
            hi += cf * mono_hi
        else:
            lo += cf * mono_hi
            hi += cf * mono_lo
    return lo, hi


def _sublevel_mc(P: BoxPolynomial, eps: float, budget: int,
                 rng: np.random.Generator) -> SublevelReport:
    xs = rng.random((budget, P.dims))
    vals = P.eval_float(*(xs[:, i] for i in range(P.dims)))
    hits = int(np.count_nonzero(np.abs(vals) < eps))
    lam = hits / budget
    bar = 1.96 * math.sqrt(max(lam * (1 - lam), 1e-12) / budget) + 1.0 / budget
    return SublevelReport(P, eps, lam, "montecarlo", bar, budget)


def estimate_sup_norm(P: BoxPolynomial, rounds: int = 3, base: int = 4096) -> float:
    """Sup of |P| on [0,1)^D by grid refinement around the running argmax."""
    _check_poly(P)
    D = P.dims
    per_axis = max(2, int(round(base ** (1.0 / D))))
    lo = np.zeros(D)
    width = 1.0
    best = 0.0
    for _ in range(rounds + 1):
        axes1 = [lo[i] + width * np.arange(per_axis) / per_axis for i in range(D)]
        grids = np.meshgrid(*axes1, indexing="ij")
        flat = [g.ravel() for g in grids]
        vals = np.abs(P.eval_float(*flat))
        arg = int(np.argmax(vals))
        best = max(best, float(vals[arg]))
        centre = np.array([flat[i][arg] for i in range(D)])
        width = 2.0 * width / per_axis
        lo = np.clip(centre - width / 2, 0.0, 1.0 - width)
    return best


def coefficient_sup_equivalence(P: BoxPolynomial, trials: int = 3) -> tuple:
    """(max|coeff| / sup_hat, sup_hat / max|coeff|) with sup_hat by refinement."""
    if P.is_zero():
        raise ZeroPolynomial("the zero polynomial has no sup-norm ratio")
    sup_hat = estimate_sup_norm(P, rounds=trials)
    mc = float(P.max_abs_coeff())
    return (mc / sup_hat, sup_hat / mc)
