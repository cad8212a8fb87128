"""Adaptive-precision real arithmetic with certified floor and fractional part.

The central object is :class:`AdaptiveReal`: an immutable handle to a real
number described by an expression DAG over the supported constants
(rationals, square roots of non-squares, pi, e) together with a two-sided
enclosure ``lower <= value <= upper``.  Enclosures are produced on demand at
a requested precision and are *nested*: once any evaluation of a node has
produced an interval, later evaluations intersect with it, so refining can
only shrink the enclosure.

Three evaluation layers back the enclosures, tried in order:

* exact rationals (``fractions.Fraction``) whenever an expression closes
  over the rationals — including floors and fractional parts;
* exact quadratic values ``a + b*sqrt(k)`` with rational a, b, which cover
  every single-surd constant and make floors of expressions like
  ``sqrt(2)*n`` pure integer arithmetic;
* outward-rounded mpfr interval arithmetic (gmpy2) at escalating working
  precision for everything else (mixed surds, pi, e, log, exp).

Floors are certified: the returned integer m is correct because the whole
final enclosure lies in [m, m+1).  When that cannot be established at the
precision cap the operation raises :class:`FloorUndecidable` rather than
guessing — the argument may genuinely be an integer up to 2^-cap.

Values are immutable after construction and refinement produces new values,
so concurrent evaluation is safe; the per-node enclosure caches only ever
tighten and any interleaving preserves soundness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import gmpy2
import numpy as np

from .errors import DomainError, FloorUndecidable, PrecisionCapExceeded

DEFAULT_PRECISION = 128
PRECISION_CAP = 4096
_GUARD_BITS = 24

__all__ = [
    "AdaptiveReal",
    "ConstantTag",
    "DEFAULT_PRECISION",
    "PRECISION_CAP",
    "certified_cmp",
    "certified_sign",
    "floor_affine_array",
    "floor_certified",
    "floor_power_array",
    "frac_certified",
    "refine",
]


# ---------------------------------------------------------------------------
# Constant tags


@dataclass(frozen=True)
class ConstantTag:
    """One of the supported real constants.

    Variants: ``rational(p, q)`` stored in lowest terms with q > 0,
    ``sqrt(k)`` with k a positive non-square integer, ``pi`` and ``euler_e``.
    """

    kind: str
    p: int = 0
    q: int = 1
    k: int = 0

    @staticmethod
    def rational(p: int, q: int = 1) -> "ConstantTag":
        if q == 0:
            raise DomainError("rational constant with zero denominator")
        f = Fraction(p, q)
        return ConstantTag("rational", p=f.numerator, q=f.denominator)

    @staticmethod
    def sqrt(k: int) -> "ConstantTag":
        if k <= 0:
            raise DomainError("sqrt argument must be positive")
        if gmpy2.is_square(gmpy2.mpz(k)):
            raise DomainError(f"sqrt({k}) is rational; use rational({math.isqrt(k)}, 1)")
        return ConstantTag("sqrt", k=k)

    @staticmethod
    def pi() -> "ConstantTag":
        return ConstantTag("pi")

    @staticmethod
    def euler_e() -> "ConstantTag":
        return ConstantTag("euler_e")

    def as_real(self) -> "AdaptiveReal":
        if self.kind == "rational":
            return AdaptiveReal._wrap(_node_rat(Fraction(self.p, self.q)))
        if self.kind == "sqrt":
            return AdaptiveReal._wrap(_mk("sqrtk", self.k))
        if self.kind == "pi":
            return AdaptiveReal._wrap(_RNode("pi", ()))
        if self.kind == "euler_e":
            return AdaptiveReal._wrap(_RNode("e", ()))
        raise DomainError(f"unknown constant kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "rational":
            return str(self.p) if self.q == 1 else f"{self.p}/{self.q}"
        if self.kind == "sqrt":
            return f"sqrt({self.k})"
        return {"pi": "pi", "euler_e": "e"}[self.kind]


# ---------------------------------------------------------------------------
# Exact layer: Fraction and quadratic values a + b*sqrt(k)


@dataclass(frozen=True)
class _Quad:
    """Exact element a + b*sqrt(k) of a real quadratic field; b != 0."""

    k: int
    a: Fraction
    b: Fraction


Exact = Union[Fraction, _Quad]


def _quad(k: int, a: Fraction, b: Fraction) -> Exact:
    return a if b == 0 else _Quad(k, a, b)


def _ex_add(x: Exact, y: Exact) -> Optional[Exact]:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x + y
    if isinstance(x, Fraction):
        return _Quad(y.k, y.a + x, y.b)
    if isinstance(y, Fraction):
        return _Quad(x.k, x.a + y, x.b)
    if x.k == y.k:
        return _quad(x.k, x.a + y.a, x.b + y.b)
    return None


def _ex_neg(x: Exact) -> Exact:
    if isinstance(x, Fraction):
        return -x
    return _Quad(x.k, -x.a, -x.b)


def _ex_mul(x: Exact, y: Exact) -> Optional[Exact]:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    if isinstance(x, Fraction):
        return _quad(y.k, y.a * x, y.b * x)
    if isinstance(y, Fraction):
        return _quad(x.k, x.a * y, x.b * y)
    if x.k == y.k:
        return _quad(x.k, x.a * y.a + x.b * y.b * x.k, x.a * y.b + x.b * y.a)
    return None


def _ex_div(x: Exact, y: Exact) -> Optional[Exact]:
    if isinstance(y, Fraction):
        if y == 0:
            raise ZeroDivisionError("division by exact zero")
        return _ex_mul(x, 1 / y)
    # 1/(a+b*sqrt(k)) = (a-b*sqrt(k)) / (a^2 - b^2 k); k non-square => denom != 0
    denom = y.a * y.a - y.b * y.b * y.k
    inv = _Quad(y.k, y.a / denom, -y.b / denom)
    return _ex_mul(x, inv)


def _ex_pow_int(x: Exact, m: int) -> Optional[Exact]:
    if m < 0:
        base = _ex_pow_int(x, -m)
        return None if base is None else _ex_div(Fraction(1), base)
    acc: Exact = Fraction(1)
    cur = x
    while m:
        if m & 1:
            nxt = _ex_mul(acc, cur)
            if nxt is None:
                return None
            acc = nxt
        m >>= 1
        if m:
            nxt = _ex_mul(cur, cur)
            if nxt is None:
                return None
            cur = nxt
    return acc


def _ex_sqrt_of_fraction(r: Fraction) -> Optional[Exact]:
    """Exact sqrt of a non-negative rational, as a rational or quadratic."""
    if r < 0:
        raise DomainError("square root of a negative value")
    if r == 0:
        return Fraction(0)
    num, den = r.numerator, r.denominator
    d = num * den  # sqrt(num/den) = sqrt(num*den)/den
    s = gmpy2.isqrt(d)
    if s * s == d:
        return Fraction(int(s), den)
    return _Quad(int(d), Fraction(0), Fraction(1, den))


def _ex_powq(x: Exact, e: Fraction) -> Optional[Exact]:
    """x**e exactly, or None when the result leaves the exact layer."""
    if e.denominator == 1:
        return _ex_pow_int(x, e.numerator)
    if not isinstance(x, Fraction):
        return None
    if x < 0:
        raise DomainError("rational power of a negative base")
    if x == 0:
        if e > 0:
            return Fraction(0)
        raise ZeroDivisionError("0 raised to a negative power")
    base = x ** e.numerator  # Fraction, exact
    if e.denominator == 2:
        return _ex_sqrt_of_fraction(base)
    rn, exact_n = gmpy2.iroot(gmpy2.mpz(base.numerator), e.denominator)
    rd, exact_d = gmpy2.iroot(gmpy2.mpz(base.denominator), e.denominator)
    if exact_n and exact_d:
        return Fraction(int(rn), int(rd))
    return None


def _cmp_surd_rational(b: Fraction, k: int, d: Fraction) -> int:
    """Exact sign of b*sqrt(k) - d using only integer arithmetic."""
    if b == 0:
        return (d < 0) - (d > 0)
    if b > 0:
        if d <= 0:
            return 1
        lhs = b * b * k
        return (lhs > d * d) - (lhs < d * d)
    if d >= 0:
        return -1
    lhs = b * b * k
    return (d * d > lhs) - (d * d < lhs)


def _ex_cmp(x: Exact, y: Exact) -> Optional[int]:
    """Exact three-way comparison, None when the fields are incompatible."""
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return (x > y) - (x < y)
    if isinstance(x, _Quad) and isinstance(y, _Quad):
        if x.k != y.k:
            return None
        return _cmp_surd_rational(x.b - y.b, x.k, y.a - x.a)
    if isinstance(x, _Quad):
        return _cmp_surd_rational(x.b, x.k, y - x.a)
    return -_cmp_surd_rational(y.b, y.k, x - y.a)


def _ex_floor(x: Exact) -> int:
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    # Common denominator: x = (A + B*sqrt(k)) / q with integer A, B, q > 0.
    q = x.a.denominator * x.b.denominator // math.gcd(x.a.denominator, x.b.denominator)
    A = x.a.numerator * (q // x.a.denominator)
    B = x.b.numerator * (q // x.b.denominator)
    s = int(gmpy2.isqrt(B * B * x.k))  # s <= |B|*sqrt(k) < s+1
    m = (A + s) // q if B > 0 else (A - s - 1) // q
    # The isqrt bracket localises the floor to within one; settle it exactly.
    while _cmp_surd_rational(x.b, x.k, Fraction(m + 1) - x.a) >= 0:
        m += 1
    while _cmp_surd_rational(x.b, x.k, Fraction(m) - x.a) < 0:
        m -= 1
    return m


def _ex_float(x: Exact) -> float:
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x.a) + float(x.b) * math.sqrt(x.k)


# ---------------------------------------------------------------------------
# Interval layer: outward-rounded mpfr endpoint pairs


class _Indeterminate(Exception):
    """Internal: the enclosure is too wide to apply the operation; escalate."""


@lru_cache(maxsize=None)
def _cd(p: int):
    return gmpy2.context(precision=p, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def _cu(p: int):
    return gmpy2.context(precision=p, round=gmpy2.RoundUp)


def _iv_from_fraction(f: Fraction, p: int):
    lo = gmpy2.mpfr(f, precision=p, context=_cd(p))
    hi = gmpy2.mpfr(f, precision=p, context=_cu(p))
    return lo, hi


def _iv_from_exact(x: Exact, p: int):
    if isinstance(x, Fraction):
        return _iv_from_fraction(x, p)
    d, u = _cd(p), _cu(p)
    slo, shi = d.sqrt(gmpy2.mpz(x.k)), u.sqrt(gmpy2.mpz(x.k))
    blo, bhi = _iv_from_fraction(x.b, p)
    plo, phi = _iv_mul((blo, bhi), (slo, shi), p)
    alo, ahi = _iv_from_fraction(x.a, p)
    return d.add(alo, plo), u.add(ahi, phi)


def _iv_add(x, y, p: int):
    return _cd(p).add(x[0], y[0]), _cu(p).add(x[1], y[1])


def _iv_sub(x, y, p: int):
    return _cd(p).sub(x[0], y[1]), _cu(p).sub(x[1], y[0])


def _iv_neg(x, p: int):
    return _cd(p).minus(x[1]), _cu(p).minus(x[0])


def _iv_mul(x, y, p: int):
    d, u = _cd(p), _cu(p)
    a, b = x
    c, e = y
    lo = min(d.mul(a, c), d.mul(a, e), d.mul(b, c), d.mul(b, e))
    hi = max(u.mul(a, c), u.mul(a, e), u.mul(b, c), u.mul(b, e))
    return lo, hi


def _iv_div(x, y, p: int):
    if y[0] <= 0 <= y[1]:
        raise _Indeterminate("divisor enclosure straddles zero")
    d, u = _cd(p), _cu(p)
    a, b = x
    c, e = y
    lo = min(d.div(a, c), d.div(a, e), d.div(b, c), d.div(b, e))
    hi = max(u.div(a, c), u.div(a, e), u.div(b, c), u.div(b, e))
    return lo, hi


def _iv_log(x, p: int):
    if x[0] <= 0:
        raise _Indeterminate("log argument enclosure reaches zero")
    return _cd(p).log(x[0]), _cu(p).log(x[1])


def _iv_exp(x, p: int):
    return _cd(p).exp(x[0]), _cu(p).exp(x[1])


def _iv_pow_int(x, m: int, p: int):
    if m == 0:
        one = gmpy2.mpfr(1, precision=p)
        return one, one
    if m < 0:
        return _iv_div((gmpy2.mpfr(1), gmpy2.mpfr(1)), _iv_pow_int(x, -m, p), p)
    acc = None
    cur = x
    while m:
        if m & 1:
            acc = cur if acc is None else _iv_mul(acc, cur, p)
        m >>= 1
        if m:
            cur = _iv_mul(cur, cur, p)
    return acc


def _iv_powq(x, e: Fraction, p: int):
    # x**e = exp(e * log x); requires a strictly positive enclosure.
    lg = _iv_log(x, p)
    ev = _iv_from_fraction(e, p)
    return _iv_exp(_iv_mul(ev, lg, p), p)


# ---------------------------------------------------------------------------
# Expression DAG


class _RNode:
    """A node of the shared expression DAG.

    ``exact`` caches the value when the subtree closes in the exact layer;
    ``best`` caches the tightest interval any evaluation has produced, which
    is what makes successive refinements nested.
    """

    __slots__ = ("op", "args", "exact", "best")

    def __init__(self, op: str, args: tuple, exact: Optional[Exact] = None):
        self.op = op
        self.args = args
        self.exact = exact
        self.best = None

    def __repr__(self):  # debugging aid only
        return f"_RNode({self.op})"


def _node_rat(f: Fraction) -> _RNode:
    return _RNode("rat", (f,), exact=f)


def _combine_exact(op: str, args: tuple) -> Optional[Exact]:
    if op == "add":
        x, y = args[0].exact, args[1].exact
        return None if x is None or y is None else _ex_add(x, y)
    if op == "sub":
        x, y = args[0].exact, args[1].exact
        if x is None or y is None:
            return None
        return _ex_add(x, _ex_neg(y))
    if op == "mul":
        x, y = args[0].exact, args[1].exact
        return None if x is None or y is None else _ex_mul(x, y)
    if op == "div":
        x, y = args[0].exact, args[1].exact
        return None if x is None or y is None else _ex_div(x, y)
    if op == "neg":
        x = args[0].exact
        return None if x is None else _ex_neg(x)
    if op == "powi":
        x = args[0].exact
        return None if x is None else _ex_pow_int(x, args[1])
    if op == "powq":
        x = args[0].exact
        return None if x is None else _ex_powq(x, args[1])
    if op == "sqrtk":
        return _ex_sqrt_of_fraction(Fraction(args[0]))
    if op == "log":
        x = args[0].exact
        return Fraction(0) if x == 1 else None
    if op == "exp":
        x = args[0].exact
        return Fraction(1) if x == 0 else None
    return None


def _mk(op: str, *args) -> _RNode:
    return _RNode(op, args, exact=_combine_exact(op, args))


def _eval_iv(node: _RNode, p: int):
    """Evaluate the node as an interval at working precision p (outward)."""
    if node.exact is not None:
        return _iv_from_exact(node.exact, p)
    op = node.op
    if op == "sqrtk":
        iv = _cd(p).sqrt(gmpy2.mpz(node.args[0])), _cu(p).sqrt(gmpy2.mpz(node.args[0]))
    elif op == "pi":
        iv = _cd(p).const_pi(), _cu(p).const_pi()
    elif op == "e":
        one = gmpy2.mpfr(1, precision=p)
        iv = _cd(p).exp(one), _cu(p).exp(one)
    elif op == "add":
        iv = _iv_add(_eval_iv(node.args[0], p), _eval_iv(node.args[1], p), p)
    elif op == "sub":
        iv = _iv_sub(_eval_iv(node.args[0], p), _eval_iv(node.args[1], p), p)
    elif op == "mul":
        iv = _iv_mul(_eval_iv(node.args[0], p), _eval_iv(node.args[1], p), p)
    elif op == "div":
        iv = _iv_div(_eval_iv(node.args[0], p), _eval_iv(node.args[1], p), p)
    elif op == "neg":
        iv = _iv_neg(_eval_iv(node.args[0], p), p)
    elif op == "powi":
        iv = _iv_pow_int(_eval_iv(node.args[0], p), node.args[1], p)
    elif op == "powq":
        iv = _iv_powq(_eval_iv(node.args[0], p), node.args[1], p)
    elif op == "log":
        iv = _iv_log(_eval_iv(node.args[0], p), p)
    elif op == "exp":
        iv = _iv_exp(_eval_iv(node.args[0], p), p)
    elif op == "rat":
        iv = _iv_from_fraction(node.args[0], p)
    else:  # pragma: no cover
        raise AssertionError(f"unknown node op {op!r}")
    best = node.best
    if best is not None:
        lo = best[0] if best[0] > iv[0] else iv[0]
        hi = best[1] if best[1] < iv[1] else iv[1]
        iv = (lo, hi)
    node.best = iv
    return iv


# ---------------------------------------------------------------------------
# AdaptiveReal


def _coerce_node(x) -> _RNode:
    if isinstance(x, AdaptiveReal):
        return x._node
    if isinstance(x, (int, Fraction)):
        return _node_rat(Fraction(x))
    if isinstance(x, ConstantTag):
        return x.as_real()._node
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact real")


class AdaptiveReal:
    """An immutable certified real: expression handle plus a refinable enclosure.

    The enclosure invariant is ``lower <= value <= upper`` with
    ``upper - lower <= 2**(2 - precision) * max(1, |upper|)``.  Construction
    is lazy; the first access to :attr:`lower` / :attr:`upper` computes an
    enclosure at :data:`DEFAULT_PRECISION`.
    """

    __slots__ = ("_node", "_enc")

    def __init__(self, value):
        self._node = _coerce_node(value)
        self._enc = None

    @classmethod
    def _wrap(cls, node: _RNode) -> "AdaptiveReal":
        out = object.__new__(cls)
        out._node = node
        out._enc = None
        return out

    # -- enclosure bookkeeping ------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._node.exact is not None

    @property
    def exact_value(self) -> Optional[Exact]:
        return self._node.exact

    def _ensure(self, precision: int = DEFAULT_PRECISION):
        if self._enc is None or self._enc[2] < precision:
            self._enc = _compute_enclosure(self._node, precision)
        return self._enc

    @property
    def lower(self) -> Fraction:
        return self._ensure()[0]

    @property
    def upper(self) -> Fraction:
        return self._ensure()[1]

    @property
    def precision(self) -> int:
        return self._ensure()[2]

    def width(self) -> Fraction:
        lo, hi, _ = self._ensure()
        return hi - lo

    def midpoint_float(self) -> float:
        if self._node.exact is not None:
            return _ex_float(self._node.exact)
        lo, hi, _ = self._ensure()
        return float((lo + hi) / 2)

    __float__ = midpoint_float

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        return AdaptiveReal._wrap(_mk("add", self._node, _coerce_node(other)))

    def __radd__(self, other):
        return AdaptiveReal._wrap(_mk("add", _coerce_node(other), self._node))

    def __sub__(self, other):
        return AdaptiveReal._wrap(_mk("sub", self._node, _coerce_node(other)))

    def __rsub__(self, other):
        return AdaptiveReal._wrap(_mk("sub", _coerce_node(other), self._node))

    def __mul__(self, other):
        return AdaptiveReal._wrap(_mk("mul", self._node, _coerce_node(other)))

    def __rmul__(self, other):
        return AdaptiveReal._wrap(_mk("mul", _coerce_node(other), self._node))

    def __truediv__(self, other):
        return AdaptiveReal._wrap(_mk("div", self._node, _coerce_node(other)))

    def __rtruediv__(self, other):
        return AdaptiveReal._wrap(_mk("div", _coerce_node(other), self._node))

    def __neg__(self):
        return AdaptiveReal._wrap(_mk("neg", self._node))

    def __pow__(self, e):
        if isinstance(e, int):
            return AdaptiveReal._wrap(_mk("powi", self._node, e))
        if isinstance(e, Fraction):
            if e.denominator == 1:
                return AdaptiveReal._wrap(_mk("powi", self._node, e.numerator))
            return AdaptiveReal._wrap(_mk("powq", self._node, e))
        raise TypeError("exponent must be an int or Fraction")

    def log(self) -> "AdaptiveReal":
        return AdaptiveReal._wrap(_mk("log", self._node))

    def exp(self) -> "AdaptiveReal":
        return AdaptiveReal._wrap(_mk("exp", self._node))

    def __repr__(self):
        if self.is_exact:
            return f"AdaptiveReal({self._node.exact!r})"
        lo, hi, p = self._ensure()
        return f"AdaptiveReal([{float(lo)!r}, {float(hi)!r}] @ {p} bits)"


def rational(p: int, q: int = 1) -> AdaptiveReal:
    return ConstantTag.rational(p, q).as_real()


def sqrt(k: int) -> AdaptiveReal:
    return ConstantTag.sqrt(k).as_real()


def pi() -> AdaptiveReal:
    return ConstantTag.pi().as_real()


def euler_e() -> AdaptiveReal:
    return ConstantTag.euler_e().as_real()


def _width_ok(lo: Fraction, hi: Fraction, precision: int) -> bool:
    return hi - lo <= Fraction(1, 1 << (precision - 2)) * max(1, abs(hi))


def _compute_enclosure(node: _RNode, precision: int):
    """(lower, upper, precision) with the width contract; escalates internally."""
    if precision > PRECISION_CAP:
        raise PrecisionCapExceeded(
            f"requested {precision} bits exceeds the cap of {PRECISION_CAP}"
        )
    if node.exact is not None:
        v = node.exact
        if isinstance(v, Fraction):
            return v, v, precision
    work = precision + _GUARD_BITS
    while True:
        try:
            lo_m, hi_m = _eval_iv(node, work)
        except _Indeterminate:
            lo_m = hi_m = None
        if lo_m is not None:
            lo = Fraction(*lo_m.as_integer_ratio())
            hi = Fraction(*hi_m.as_integer_ratio())
            if _width_ok(lo, hi, precision):
                return lo, hi, precision
        if work >= 8 * PRECISION_CAP:
            raise PrecisionCapExceeded(
                f"could not reach width 2^{2 - precision} within the working cap"
            )
        work *= 2


def refine(x: AdaptiveReal, precision: int) -> AdaptiveReal:
    """Return a new value whose enclosure meets the width contract at ``precision``.

    Raises :class:`PrecisionCapExceeded` when more than the cap is requested.
    Refinements of the same underlying expression are nested.
    """
    enc = _compute_enclosure(x._node, precision)
    out = AdaptiveReal._wrap(x._node)
    out._enc = enc
    return out


def floor_certified(x: AdaptiveReal, path: tuple[str, ...] = ()) -> int:
    """The integer part of x, certified by an enclosure inside [m, m+1).

    Precision escalates by doubling from 128 bits up to the cap; at the cap
    an enclosure still straddling an integer raises :class:`FloorUndecidable`.
    """
    ex = x._node.exact
    if ex is not None:
        return _ex_floor(ex)
    p = DEFAULT_PRECISION
    while True:
        try:
            lo, hi = _eval_iv(x._node, p)
        except _Indeterminate:
            lo = hi = None
        if lo is not None:
            m = int(gmpy2.floor(lo))
            if hi < m + 1:
                return m
        if p >= PRECISION_CAP:
            raise FloorUndecidable(
                f"enclosure straddles an integer at the {PRECISION_CAP}-bit cap",
                path,
            )
        p = min(2 * p, PRECISION_CAP)


def frac_certified(x: AdaptiveReal, path: tuple[str, ...] = ()) -> AdaptiveReal:
    """x - floor(x), with a certified enclosure inside [0, 1)."""
    m = floor_certified(x, path)
    node = _mk("sub", x._node, _node_rat(Fraction(m)))
    out = AdaptiveReal._wrap(node)
    if node.exact is not None:
        return out
    # Tighten until the enclosure itself sits inside [0, 1).
    p = DEFAULT_PRECISION
    while True:
        try:
            lo, hi = _eval_iv(node, p)
            if lo >= 0 and hi < 1:
                return out
        except _Indeterminate:
            pass
        if p >= PRECISION_CAP:
            raise FloorUndecidable(
                "fractional part cannot be separated from the unit interval ends",
                path,
            )
        p = min(2 * p, PRECISION_CAP)


def certified_sign(x: AdaptiveReal, path: tuple[str, ...] = ()) -> int:
    """Sign of x in {-1, 0, +1}; 0 only for exactly-zero values."""
    ex = x._node.exact
    if ex is not None:
        if isinstance(ex, Fraction):
            return (ex > 0) - (ex < 0)
        return _cmp_surd_rational(ex.b, ex.k, -ex.a)
    p = DEFAULT_PRECISION
    while True:
        try:
            lo, hi = _eval_iv(x._node, p)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        except _Indeterminate:
            pass
        if p >= PRECISION_CAP:
            raise FloorUndecidable("sign undecidable at the precision cap", path)
        p = min(2 * p, PRECISION_CAP)


def certified_cmp(x: AdaptiveReal, y) -> int:
    """Three-way comparison of certified reals (exact when both are exact)."""
    if not isinstance(y, AdaptiveReal):
        y = AdaptiveReal(y)
    ex, ey = x._node.exact, y._node.exact
    if ex is not None and ey is not None:
        c = _ex_cmp(ex, ey)
        if c is not None:
            return c
    return certified_sign(x - y)


# ---------------------------------------------------------------------------
# Vectorised certified floors
#
# These are performance paths for bulk word generation.  Each entry is either
# certified by a float error bound (the value is provably farther from the
# nearest integer than the accumulated float64 error) or recomputed exactly.


def _as_exact(x) -> Optional[Exact]:
    if isinstance(x, AdaptiveReal):
        return x._node.exact
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return None


def floor_affine_array(alpha, beta, n: np.ndarray) -> np.ndarray:
    """``floor(alpha*m + beta)`` for every m in ``n`` (int64 array).

    Identical results to per-entry :func:`floor_certified`; exact fallbacks
    handle entries too close to an integer for the float path to certify.
    """
    ea, eb = _as_exact(alpha), _as_exact(beta)
    n = np.asarray(n, dtype=np.int64)
    if ea is None or eb is None:
        a = alpha if isinstance(alpha, AdaptiveReal) else AdaptiveReal(alpha)
        b = beta if isinstance(beta, AdaptiveReal) else AdaptiveReal(beta)
        return np.array(
            [floor_certified(a * int(m) + b) for m in n], dtype=np.int64
        )
    af, bf = _ex_float(ea), _ex_float(eb)
    vals = af * n.astype(np.float64) + bf
    mags = np.abs(vals) + 1.0
    err = mags * (64.0 * 2.0**-53)
    fl = np.floor(vals)
    frac = vals - fl
    suspect = (frac <= err) | (frac >= 1.0 - err) | ~np.isfinite(vals)
    out = fl.astype(np.int64)
    for i in np.nonzero(suspect)[0]:
        m = int(n[i])
        v = _ex_add(_ex_mul(ea, Fraction(m)), eb)
        if v is None:  # alpha and beta live in different quadratic fields
            out[i] = floor_certified(AdaptiveReal._wrap(_node_rat(Fraction(m))) * alpha + beta)
        else:
            out[i] = _ex_floor(v)
    return out


def floor_power_array(n: np.ndarray, exponent: Fraction) -> np.ndarray:
    """``floor(m**exponent)`` for every non-negative m in ``n``.

    Supports rational exponents; entries whose float evaluation cannot be
    certified are recomputed exactly (integer k-th roots).
    """
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise DomainError("floor_power_array requires non-negative inputs")
    e = Fraction(exponent)
    if e.denominator == 1:
        return np.array([int(m) ** e.numerator for m in n], dtype=np.int64)
    vals = np.power(n.astype(np.float64), float(e))
    mags = np.abs(vals) + 1.0
    err = mags * (64.0 * 2.0**-53)
    fl = np.floor(vals)
    frac = vals - fl
    suspect = (frac <= err) | (frac >= 1.0 - err) | ~np.isfinite(vals)
    out = fl.astype(np.int64)
    for i in np.nonzero(suspect)[0]:
        v = _ex_powq(Fraction(int(n[i])), e)
        if v is None:  # denominator other than 1 or 2 and not a perfect power
            out[i] = floor_certified(AdaptiveReal(int(n[i])) ** e)
        else:
            out[i] = _ex_floor(v)
    return out
