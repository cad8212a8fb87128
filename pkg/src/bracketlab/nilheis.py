"""The 3-dimensional Heisenberg group in coordinates of the second kind,
its integer lattice, polynomial orbits on the quotient, equidistribution
statistics, and the circle-suspension evaluation of floor compositions.

Group law: (x1,x2,x3)(y1,y2,y3) = (x1+y1, x2+y2, x3+y3+x1*y2), which makes
the integer triples a lattice and identifies the quotient with [0,1)^3.
Reduction multiplies on the right by lattice generators in the fixed order
first, second, then central coordinate; the chosen representative depends
on that order (consistency matters, canonicity does not).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .exactreal import AdaptiveReal, floor_certified, frac_certified

__all__ = [
    "EquidistributionStats",
    "HeisElement",
    "NilPolySeq",
    "SuspensionSystem",
    "heis_identity",
    "heis_inv",
    "heis_mul",
    "heis_pow",
    "heis_reduce",
    "orbit_equidistribution",
    "orbit_points_float",
    "poly_orbit",
    "suspension_eval",
    "suspension_direct",
]


def _coerce(x) -> AdaptiveReal:
    if isinstance(x, AdaptiveReal):
        return x
    if isinstance(x, (int, Fraction)):
        return AdaptiveReal(x)
    if isinstance(x, str):
        from .gp_core import _as_const_expr, eval_gp

        return eval_gp(_as_const_expr(x), 0)
    raise DomainError(f"cannot read {x!r} as a coordinate")


@dataclass(frozen=True)
class HeisElement:
    """Group element in global coordinates (exact rationals or enclosures)."""

    x1: AdaptiveReal
    x2: AdaptiveReal
    x3: AdaptiveReal

    @staticmethod
    def of(x1, x2, x3) -> "HeisElement":
        return HeisElement(_coerce(x1), _coerce(x2), _coerce(x3))

    def exact_triple(self) -> Optional[tuple]:
        vals = (self.x1.exact_value, self.x2.exact_value, self.x3.exact_value)
        if all(isinstance(v, Fraction) for v in vals):
            return vals
        return None

    def float_triple(self) -> tuple:
        return (self.x1.midpoint_float(), self.x2.midpoint_float(),
                self.x3.midpoint_float())


def heis_identity() -> HeisElement:
    return HeisElement.of(0, 0, 0)


def heis_mul(a: HeisElement, b: HeisElement) -> HeisElement:
    return HeisElement(a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3 + a.x1 * b.x2)


def heis_inv(g: HeisElement) -> HeisElement:
    return HeisElement(-g.x1, -g.x2, -g.x3 + g.x1 * g.x2)


def heis_pow(g: HeisElement, n: int) -> HeisElement:
    """g^n in closed form: (n a, n b, n c + binom(n,2) a b); any integer n."""
    binom2 = n * (n - 1) // 2
    return HeisElement(g.x1 * n, g.x2 * n, g.x3 * n + g.x1 * g.x2 * binom2)


def heis_reduce(g: HeisElement) -> tuple:
    """(point in [0,1)^3, lattice triple gamma) with g * gamma reduced.

    Reduction order: first coordinate, second, then the central one; the
    lattice element is returned as the integer triple (p, q, r) so that
    right-multiplying g by (p,0,0)(0,q,0)(0,0,r) lands in the unit box.
    """
    m1 = floor_certified(g.x1, ("heis_reduce", "x1"))
    m2 = floor_certified(g.x2, ("heis_reduce", "x2"))
    u1 = frac_certified(g.x1, ("heis_reduce", "x1"))
    u2 = frac_certified(g.x2, ("heis_reduce", "x2"))
    w3 = g.x3 - u1 * m2
    m3 = floor_certified(w3, ("heis_reduce", "x3"))
    u3 = frac_certified(w3, ("heis_reduce", "x3"))
    return (u1, u2, u3), (-m1, -m2, -m3)


def lattice_element(p: int, q: int, r: int) -> HeisElement:
    return heis_mul(heis_mul(HeisElement.of(p, 0, 0), HeisElement.of(0, q, 0)),
                    HeisElement.of(0, 0, r))


# ---------------------------------------------------------------------------
# Polynomial orbits


@dataclass(frozen=True)
class NilPolySeq:
    """g(n) = g0 * g1^n * g2^binom(n,2) with the quadratic part central."""

    g0: HeisElement
    g1: HeisElement
    g2: HeisElement

    def __post_init__(self):
        for coord in (self.g2.x1, self.g2.x2):
            ex = coord.exact_value
            if not (isinstance(ex, Fraction) and ex == 0):
                raise DomainError("the quadratic entry must be central: (0, 0, z)")

    def at(self, n: int) -> HeisElement:
        gn = heis_pow(self.g1, n)
        head = heis_mul(self.g0, gn)
        central = self.g2.x3 * (n * (n - 1) // 2)
        return HeisElement(head.x1, head.x2, head.x3 + central)


def poly_orbit(seq: NilPolySeq, N: int) -> list:
    """Reduced points tau(g(n)Gamma) for n < N via closed-form powers."""
    if N > 10**7:
        raise DomainError("orbit length cap is 1e7")
    out = []
    for n in range(N):
        point, _ = heis_reduce(seq.at(n))
        out.append(point)
    return out


def poly_orbit_incremental(seq: NilPolySeq, N: int) -> list:
    """Same orbit by repeated multiplication: g(n+1) = g(n) * g1 * g2^n."""
    out = []
    cur = seq.g0
    for n in range(N):
        point, _ = heis_reduce(cur)
        out.append(point)
        step = heis_mul(seq.g1, heis_pow(seq.g2, n))
        cur = heis_mul(cur, step)
    return out


def orbit_points_float(points: Sequence) -> np.ndarray:
    arr = np.empty((len(points), 3), dtype=np.float64)
    for i, p in enumerate(points):
        arr[i, 0] = p[0].midpoint_float()
        arr[i, 1] = p[1].midpoint_float()
        arr[i, 2] = p[2].midpoint_float()
    return arr


# ---------------------------------------------------------------------------
# Equidistribution statistics


@dataclass(frozen=True)
class EquidistributionStats:
    count: int
    frequency_magnitudes: dict  # (k1,k2,0) -> |average of e(k1 x1 + k2 x2)|
    box_discrepancy: float
    box_level: int


def orbit_equidistribution(points, test_frequencies: Sequence = ((1, 0, 0), (0, 1, 0)),
                           box_level: int = 3) -> EquidistributionStats:
    """Horizontal character averages and a dyadic box-counting discrepancy.

    Characters of the quotient depend on the horizontal coordinates only, so
    test frequencies must have zero third entry.  The box statistic is the
    worst |empirical mass - volume| over all axis-aligned boxes with corners
    on the dyadic grid of the given level.
    """
    if len(points) == 0:
        raise DomainError("empty orbit")
    arr = points if isinstance(points, np.ndarray) else orbit_points_float(points)
    n = len(arr)
    mags = {}
    for k in test_frequencies:
        k = tuple(int(v) for v in k)
        if len(k) != 3 or k[2] != 0:
            raise DomainError("test frequencies must be integer triples (k1, k2, 0)")
        phases = np.exp(2j * math.pi * (k[0] * arr[:, 0] + k[1] * arr[:, 1]))
        mags[k] = float(abs(phases.mean()))
    side = 1 << box_level
    hist, _ = np.histogramdd(arr, bins=(side, side, side),
                             range=((0, 1), (0, 1), (0, 1)))
    pref = hist.cumsum(0).cumsum(1).cumsum(2)
    pref = np.pad(pref, ((1, 0), (1, 0), (1, 0)))
    worst = 0.0
    cell = 1.0 / side
    for a1 in range(side):
        for b1 in range(a1 + 1, side + 1):
            for a2 in range(side):
                for b2 in range(a2 + 1, side + 1):
                    block = (
                        pref[b1, b2, :] - pref[a1, b2, :]
                        - pref[b1, a2, :] + pref[a1, a2, :]
                    )
                    for a3 in range(side):
                        for b3 in range(a3 + 1, side + 1):
                            mass = (block[b3] - block[a3]) / n
                            vol = (b1 - a1) * (b2 - a2) * (b3 - a3) * cell**3
                            dev = abs(mass - vol)
                            if dev > worst:
                                worst = dev
    return EquidistributionStats(n, mags, worst, box_level)


# ---------------------------------------------------------------------------
# Circle suspension


@dataclass(frozen=True)
class SuspensionSystem:
    """Product of the base circle rotation with a skew time coordinate.

    The base system is the circle rotation by ``alpha`` observed through the
    identity coordinate; ``poly`` holds the coefficients (constant first) of
    the real polynomial driving the time coordinate.
    """

    alpha: AdaptiveReal
    poly: tuple
    base: str = "circle-identity"

    @staticmethod
    def of(alpha, poly: Sequence) -> "SuspensionSystem":
        return SuspensionSystem(_coerce(alpha), tuple(_coerce(c) for c in poly))

    def poly_at(self, n: int) -> AdaptiveReal:
        acc = self.poly[-1]
        for c in reversed(self.poly[:-1]):
            acc = acc * n + c
        return acc


def suspension_eval(sys: SuspensionSystem, n: int) -> AdaptiveReal:
    """Observable of the suspension orbit at time n.

    Evaluates frac(alpha*p(n) - alpha*frac(p(n))), the suspension's value at
    the orbit point; it must equal frac(alpha * floor(p(n))), which
    :func:`suspension_direct` computes for cross-checking.
    """
    if sys.base != "circle-identity":
        raise DomainError("only the circle-identity base system is implemented")
    t = sys.poly_at(n)
    ft = frac_certified(t, ("suspension", "frac(p(n))"))
    return frac_certified(sys.alpha * t - sys.alpha * ft, ("suspension", "value"))


def suspension_direct(sys: SuspensionSystem, n: int) -> AdaptiveReal:
    """frac(alpha * floor(p(n))): the floor composition the suspension encodes."""
    t = sys.poly_at(n)
    m = floor_certified(t, ("suspension", "floor(p(n))"))
    return frac_certified(sys.alpha * m, ("suspension", "direct"))
