"""Logarithmic-exponential growth expressions in one variable t.

Supports parsing, symbolic differentiation with simplification, numeric
growth-order estimation against powers of t, and Taylor models around a
centre N with a certified remainder bound over a window [N, N+H].

The grammar extends the bracket-expression grammar with ``t``, true
division, ``log(...)``, ``exp(...)`` and rational exponents, and drops
``floor``/``frac``::

    expr     := ["-"] term (("+"|"-") term)*
    term     := factor (("*"|"/") factor)*
    factor   := atom ("^" exponent)?
    exponent := uint | "(" ["-"] uint ["/" uint] ")"
    atom     := uint | "sqrt(" uint ")" | "pi" | "e" | "t"
              | "log(" expr ")" | "exp(" expr ")" | "(" expr ")"

Functions are taken as concrete representatives on a working half-line
[t0, infinity); t0 defaults to 2 and positivity of log/division arguments is
probed numerically at t0 and 10*t0 (a :class:`DomainWarning` on failure).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, DomainWarning, OrderCapExceeded, SignChange
from .exactreal import AdaptiveReal, ConstantTag, certified_cmp, certified_sign
from .errors import FloorUndecidable
from .gp_core import _Tokens

__all__ = [
    "DEFAULT_T0",
    "GrowthEstimate",
    "HardyExpr",
    "ProbeGrid",
    "TaylorModel",
    "differentiate",
    "eval_hardy",
    "envelope_constant",
    "FloorIndex",
    "growth_order",
    "hardy_to_text",
    "parse_hardy",
    "remainder_envelope",
    "taylor_model",
]

DEFAULT_T0 = 2
ORDER_CAP = 12


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class HConst:
    tag: ConstantTag


@dataclass(frozen=True)
class HVar:
    pass


@dataclass(frozen=True)
class HAdd:
    left: "HardyExpr"
    right: "HardyExpr"


@dataclass(frozen=True)
class HSub:
    left: "HardyExpr"
    right: "HardyExpr"


@dataclass(frozen=True)
class HMul:
    left: "HardyExpr"
    right: "HardyExpr"


@dataclass(frozen=True)
class HDiv:
    left: "HardyExpr"
    right: "HardyExpr"


@dataclass(frozen=True)
class HLog:
    child: "HardyExpr"


@dataclass(frozen=True)
class HExp:
    child: "HardyExpr"


@dataclass(frozen=True)
class HPow:
    base: "HardyExpr"
    exponent: Fraction


HardyExpr = Union[HConst, HVar, HAdd, HSub, HMul, HDiv, HLog, HExp, HPow]

_T = HVar()
_ZERO = HConst(ConstantTag.rational(0))
_ONE = HConst(ConstantTag.rational(1))


def _is_rat(e) -> bool:
    return isinstance(e, HConst) and e.tag.kind == "rational"


def _rat_of(e) -> Fraction:
    return Fraction(e.tag.p, e.tag.q)


def _const(r: Fraction) -> HConst:
    return HConst(ConstantTag.rational(r.numerator, r.denominator))


def h_add(a, b):
    if _is_rat(a) and _is_rat(b):
        return _const(_rat_of(a) + _rat_of(b))
    if _is_rat(a) and _rat_of(a) == 0:
        return b
    if _is_rat(b) and _rat_of(b) == 0:
        return a
    return HAdd(a, b)


def h_sub(a, b):
    if _is_rat(a) and _is_rat(b):
        return _const(_rat_of(a) - _rat_of(b))
    if _is_rat(b) and _rat_of(b) == 0:
        return a
    return HSub(a, b)


def h_mul(a, b):
    if _is_rat(a):
        ra = _rat_of(a)
        if ra == 0:
            return _ZERO
        if ra == 1:
            return b
        if _is_rat(b):
            return _const(ra * _rat_of(b))
        if isinstance(b, HMul) and _is_rat(b.left):
            return h_mul(_const(ra * _rat_of(b.left)), b.right)
        return HMul(a, b)
    if _is_rat(b):
        return h_mul(b, a)  # rational coefficient kept on the left
    return HMul(a, b)


def h_div(a, b):
    if _is_rat(b):
        rb = _rat_of(b)
        if rb == 0:
            raise DomainError("division by the zero constant")
        return h_mul(_const(1 / rb), a)
    if _is_rat(a) and _rat_of(a) == 0:
        return _ZERO
    return HDiv(a, b)


def h_pow(base, exponent: Fraction):
    exponent = Fraction(exponent)
    if exponent == 0:
        return _ONE
    if exponent == 1:
        return base
    if _is_rat(base) and exponent.denominator == 1:
        return _const(_rat_of(base) ** exponent.numerator)
    if isinstance(base, HPow):
        return h_pow(base.base, base.exponent * exponent)
    return HPow(base, exponent)


def h_log(child):
    if _is_rat(child) and _rat_of(child) == 1:
        return _ZERO
    return HLog(child)


def h_exp(child):
    if _is_rat(child) and _rat_of(child) == 0:
        return _ONE
    return HExp(child)


# ---------------------------------------------------------------------------
# Parsing and printing


def parse_hardy(text: str, t0: int = DEFAULT_T0) -> HardyExpr:
    """Parse a growth expression and probe positivity at t0 and 10*t0."""
    toks = _Tokens(text)
    expr = _parse_expr(toks)
    if toks.peek() is not None:
        toks.fail({"end of input", "+", "-", "*", "/", "^"})
    _probe_positivity(expr, t0)
    return expr


def _parse_expr(toks: _Tokens) -> HardyExpr:
    negate = toks.next_if("op", "-") is not None
    acc = _parse_term(toks)
    if negate:
        acc = h_mul(_const(Fraction(-1)), acc)
    while True:
        if toks.next_if("op", "+"):
            acc = h_add(acc, _parse_term(toks))
        elif toks.next_if("op", "-"):
            acc = h_sub(acc, _parse_term(toks))
        else:
            return acc


def _parse_term(toks: _Tokens) -> HardyExpr:
    acc = _parse_factor(toks)
    while True:
        if toks.next_if("op", "*"):
            acc = h_mul(acc, _parse_factor(toks))
        elif toks.next_if("op", "/"):
            acc = h_div(acc, _parse_factor(toks))
        else:
            return acc


def _parse_factor(toks: _Tokens) -> HardyExpr:
    atom = _parse_atom(toks)
    if toks.next_if("op", "^"):
        return h_pow(atom, _parse_exponent(toks))
    return atom


def _parse_exponent(toks: _Tokens) -> Fraction:
    t = toks.next_if("int")
    if t is not None:
        return Fraction(int(t[1]))
    toks.expect("op", "(", expected="( or unsigned integer")
    sign = -1 if toks.next_if("op", "-") else 1
    num = toks.expect("int", expected="unsigned integer")
    den = 1
    if toks.next_if("op", "/"):
        den = int(toks.expect("int", expected="unsigned integer")[1])
    toks.expect("op", ")")
    return Fraction(sign * int(num[1]), den)


def _parse_atom(toks: _Tokens) -> HardyExpr:
    t = toks.peek()
    if t is None:
        toks.fail({"number", "t", "pi", "e", "sqrt(", "log(", "exp(", "("})
    kind, value, _ = t
    if kind == "int":
        toks.i += 1
        return _const(Fraction(int(value)))
    if kind == "op" and value == "(":
        toks.i += 1
        inner = _parse_expr(toks)
        toks.expect("op", ")")
        return inner
    if kind == "name":
        toks.i += 1
        if value == "t":
            return _T
        if value == "pi":
            return HConst(ConstantTag.pi())
        if value == "e":
            return HConst(ConstantTag.euler_e())
        if value == "sqrt":
            toks.expect("op", "(")
            arg = toks.expect("int", expected="unsigned integer")
            toks.expect("op", ")")
            return HConst(ConstantTag.sqrt(int(arg[1])))
        if value in ("log", "exp"):
            toks.expect("op", "(")
            inner = _parse_expr(toks)
            toks.expect("op", ")")
            return HLog(inner) if value == "log" else HExp(inner)
    toks.fail({"number", "t", "pi", "e", "sqrt(", "log(", "exp(", "("})


_LEVEL_ADD, _LEVEL_MUL, _LEVEL_POW, _LEVEL_ATOM = 0, 1, 2, 3


def hardy_to_text(e: HardyExpr) -> str:
    return _print(e, _LEVEL_ADD)


def _print(e: HardyExpr, level: int) -> str:
    if isinstance(e, HConst):
        s = str(e.tag)
        if e.tag.kind == "rational" and e.tag.p < 0 and level > _LEVEL_ADD:
            return f"({s})"
        return s
    if isinstance(e, HVar):
        return "t"
    if isinstance(e, HLog):
        return f"log({_print(e.child, _LEVEL_ADD)})"
    if isinstance(e, HExp):
        return f"exp({_print(e.child, _LEVEL_ADD)})"
    if isinstance(e, HPow):
        ex = e.exponent
        es = str(ex.numerator) if ex.denominator == 1 and ex >= 0 else (
            f"({ex.numerator}/{ex.denominator})" if ex.denominator != 1 else f"({ex.numerator})"
        )
        return f"{_print(e.base, _LEVEL_ATOM)}^{es}"
    if isinstance(e, HAdd):
        s = f"{_print(e.left, _LEVEL_ADD)} + {_print(e.right, _LEVEL_MUL)}"
        return f"({s})" if level > _LEVEL_ADD else s
    if isinstance(e, HSub):
        s = f"{_print(e.left, _LEVEL_ADD)} - {_print(e.right, _LEVEL_MUL)}"
        return f"({s})" if level > _LEVEL_ADD else s
    if isinstance(e, HMul):
        s = f"{_print(e.left, _LEVEL_MUL)}*{_print(e.right, _LEVEL_POW)}"
        return f"({s})" if level > _LEVEL_MUL else s
    if isinstance(e, HDiv):
        s = f"{_print(e.left, _LEVEL_MUL)}/{_print(e.right, _LEVEL_POW)}"
        return f"({s})" if level > _LEVEL_MUL else s
    raise TypeError(f"not a growth expression: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation


def eval_hardy(e: HardyExpr, t) -> AdaptiveReal:
    """Certified value at t (int, Fraction or AdaptiveReal)."""
    tv = t if isinstance(t, AdaptiveReal) else AdaptiveReal(t)
    return _eval(e, tv)


def _eval(e: HardyExpr, t: AdaptiveReal) -> AdaptiveReal:
    if isinstance(e, HConst):
        return e.tag.as_real()
    if isinstance(e, HVar):
        return t
    if isinstance(e, HAdd):
        return _eval(e.left, t) + _eval(e.right, t)
    if isinstance(e, HSub):
        return _eval(e.left, t) - _eval(e.right, t)
    if isinstance(e, HMul):
        return _eval(e.left, t) * _eval(e.right, t)
    if isinstance(e, HDiv):
        return _eval(e.left, t) / _eval(e.right, t)
    if isinstance(e, HLog):
        return _eval(e.child, t).log()
    if isinstance(e, HExp):
        return _eval(e.child, t).exp()
    if isinstance(e, HPow):
        return _eval(e.base, t) ** e.exponent
    raise TypeError(f"not a growth expression: {e!r}")


def _probe_positivity(e: HardyExpr, t0: int) -> None:
    for t in (t0, 10 * t0):
        for sub in _domain_sensitive(e):
            try:
                v = eval_hardy(sub, t)
                if certified_sign(v) <= 0:
                    warnings.warn(
                        f"argument {hardy_to_text(sub)!r} is not positive at t={t}; "
                        f"raise t0 or adjust the expression",
                        DomainWarning,
                        stacklevel=3,
                    )
            except (DomainError, ZeroDivisionError, FloorUndecidable):
                warnings.warn(
                    f"could not confirm positivity of {hardy_to_text(sub)!r} at t={t}",
                    DomainWarning,
                    stacklevel=3,
                )


def _domain_sensitive(e: HardyExpr) -> list:
    """Subexpressions that must stay positive: log arguments, divisors, pow bases."""
    out = []

    def walk(node):
        if isinstance(node, (HAdd, HSub, HMul)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, HDiv):
            walk(node.left)
            walk(node.right)
            out.append(node.right)
        elif isinstance(node, HLog):
            walk(node.child)
            out.append(node.child)
        elif isinstance(node, HExp):
            walk(node.child)
        elif isinstance(node, HPow):
            walk(node.base)
            if node.exponent.denominator != 1 or node.exponent < 0:
                out.append(node.base)

    walk(e)
    return out


# ---------------------------------------------------------------------------
# Differentiation


def differentiate(f: HardyExpr, order: int = 1) -> HardyExpr:
    """Symbolic derivative of the given order (standard rules, simplified)."""
    if order < 1:
        raise DomainError("differentiation order must be >= 1")
    if order > ORDER_CAP:
        raise OrderCapExceeded(f"order {order} above the cap of {ORDER_CAP}")
    out = f
    for _ in range(order):
        out = _d(out)
    return out


def derivative_chain(f: HardyExpr, upto: int) -> list:
    """[f, f', ..., f^(upto)] with each step simplified once."""
    if upto > ORDER_CAP:
        raise OrderCapExceeded(f"order {upto} above the cap of {ORDER_CAP}")
    chain = [f]
    for _ in range(upto):
        chain.append(_d(chain[-1]))
    return chain


def _d(e: HardyExpr) -> HardyExpr:
    if isinstance(e, (HConst,)):
        return _ZERO
    if isinstance(e, HVar):
        return _ONE
    if isinstance(e, HAdd):
        return h_add(_d(e.left), _d(e.right))
    if isinstance(e, HSub):
        return h_sub(_d(e.left), _d(e.right))
    if isinstance(e, HMul):
        return h_add(h_mul(_d(e.left), e.right), h_mul(e.left, _d(e.right)))
    if isinstance(e, HDiv):
        num = h_sub(h_mul(_d(e.left), e.right), h_mul(e.left, _d(e.right)))
        return h_div(num, h_pow(e.right, Fraction(2)))
    if isinstance(e, HLog):
        return h_div(_d(e.child), e.child)
    if isinstance(e, HExp):
        return h_mul(_d(e.child), HExp(e.child))
    if isinstance(e, HPow):
        lead = h_mul(_const(e.exponent), h_pow(e.base, e.exponent - 1))
        return h_mul(lead, _d(e.base))
    raise TypeError(f"not a growth expression: {e!r}")


def _is_zero_expr(e: HardyExpr) -> bool:
    return _is_rat(e) and _rat_of(e) == 0


# ---------------------------------------------------------------------------
# Growth order


@dataclass(frozen=True)
class ProbeGrid:
    """Geometric t-grid for growth estimation."""

    t_min: int = 10_000
    t_max: int = 100_000_000
    count: int = 17

    def points(self) -> list:
        ratio = (self.t_max / self.t_min) ** (1.0 / (self.count - 1))
        return sorted({int(round(self.t_min * ratio**i)) for i in range(self.count)})


@dataclass(frozen=True)
class GrowthEstimate:
    """Estimated growth exponent with its confidence window and integer bound k."""

    kappa_hat: float
    window: tuple
    k: int


def growth_order(f: HardyExpr, probes: Optional[ProbeGrid] = None,
                 declared_k: Optional[int] = None) -> GrowthEstimate:
    """Least-squares growth exponent of f against powers of t.

    kappa_hat is the slope of log|f| over log t on the probe grid; k is the
    declared integer bound when given, else snapped from kappa_hat (an
    integer within 0.02 is kept, otherwise ceil(kappa_hat + 0.1)).
    Raises :class:`SignChange` when f takes both signs on the grid.
    """
    grid = (probes or ProbeGrid()).points()
    xs, ys, signs = [], [], set()
    for t in grid:
        v = eval_hardy(f, t)
        s = certified_sign(v)
        if s != 0:
            signs.add(s)
            xs.append(math.log(t))
            ys.append(math.log(abs(v.midpoint_float())))
    if len(signs) > 1:
        raise SignChange("function changes sign on the probe grid; raise t0")
    if len(xs) < 2:
        return GrowthEstimate(float("-inf"), (float("-inf"), float("-inf")), declared_k or 0)
    n = len(xs)
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    sxx = sum((x - xbar) ** 2 for x in xs)
    kappa = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sxx
    resid = [y - ybar - kappa * (x - xbar) for x, y in zip(xs, ys)]
    se = math.sqrt(sum(r * r for r in resid) / max(n - 2, 1) / sxx)
    half = max(2.0 * se, 1e-9)
    if declared_k is not None:
        k = declared_k
    else:
        nearest = round(kappa)
        k = nearest if abs(kappa - nearest) <= 0.02 else math.ceil(kappa + 0.1)
    return GrowthEstimate(kappa, (kappa - half, kappa + half), k)


# ---------------------------------------------------------------------------
# Taylor models


@dataclass(frozen=True)
class TaylorModel:
    """Window polynomial of degree order-1 at the centre plus a remainder bound.

    coefficients[j] encloses f^(j)(center)/j!; remainder_bound dominates
    sup over 0 <= y <= window of the truncation error.
    """

    center: int
    order: int
    coefficients: tuple
    remainder_bound: AdaptiveReal
    window: int

    def evaluate(self, h) -> AdaptiveReal:
        acc = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * h + c
        return acc

    def remainder_bound_float(self) -> float:
        return self.remainder_bound.midpoint_float()


def _abs_upper(x: AdaptiveReal) -> AdaptiveReal:
    # Certified |x| as a value: exact when x is exact, else via the sign.
    try:
        return x if certified_sign(x) >= 0 else -x
    except FloorUndecidable:
        # sign undecidable at the cap: fall back to the enclosure envelope,
        # which dominates |x| whatever the sign
        return AdaptiveReal(max(abs(x.lower), abs(x.upper)))


def taylor_model(f: HardyExpr, N: int, ell: int, H: int, t0: int = DEFAULT_T0) -> TaylorModel:
    """Certified Taylor model of length ell at centre N over the window [0, H].

    The remainder bound is (H^ell / ell!) * sup over [N, N+H] of |f^(ell)|,
    with the sup taken at the endpoints when f^(ell+1) has constant sampled
    sign and from a doubled 64-point grid otherwise.
    """
    if ell < 1:
        raise DomainError("taylor model needs order >= 1")
    if N < t0 + H:
        raise DomainError(f"centre {N} below working threshold t0 + H = {t0 + H}")
    chain = derivative_chain(f, ell + 1)
    coeffs = []
    fact = 1
    for j in range(ell):
        if j:
            fact *= j
        coeffs.append(eval_hardy(chain[j], N) / fact)
    g, gprime = chain[ell], chain[ell + 1]
    if _is_zero_expr(g):
        bound = AdaptiveReal(0)
    else:
        sup = _sup_abs(g, gprime, N, H)
        scale = Fraction(H**ell, math.factorial(ell))
        bound = sup * scale
    return TaylorModel(N, ell, tuple(coeffs), bound, H)


def _sup_abs(g: HardyExpr, gprime: HardyExpr, N: int, H: int) -> AdaptiveReal:
    if _is_zero_expr(gprime):
        return _abs_upper(eval_hardy(g, N))
    samples = [N, N + max(H // 2, 1), N + max(H, 1)]
    try:
        signs = {certified_sign(eval_hardy(gprime, t)) for t in samples}
    except FloorUndecidable:
        signs = {0}
    if 0 not in signs and len(signs) == 1:
        a = _abs_upper(eval_hardy(g, N))
        b = _abs_upper(eval_hardy(g, N + H))
        try:
            return a if certified_cmp(a, b) >= 0 else b
        except FloorUndecidable:
            return a + b  # order undecidable; the sum still dominates the max
    best = None
    for i in range(65):
        t = Fraction(N) + Fraction(i * H, 64)
        v = _abs_upper(eval_hardy(g, t))
        if best is None or _cmp_lenient(v, best) > 0:
            best = v
    return best * 2


def _cmp_lenient(a: AdaptiveReal, b: AdaptiveReal) -> int:
    try:
        return certified_cmp(a, b)
    except FloorUndecidable:
        return 0  # either maximiser works: the candidates agree to 2^-cap


def remainder_envelope(f: HardyExpr, k, ell: int, N: int, H: int) -> float:
    """The predicted remainder envelope H^ell * N^(k-ell) for f << t^k.

    ``k`` may be any real growth exponent (an integer bound or a fitted
    kappa such as 3/2); the envelope only uses its value.
    """
    kf = float(k)
    if ell <= kf:
        raise DomainError("the envelope requires ell > k")
    if H > N:
        raise DomainError("the envelope requires H <= N")
    if H == 0:
        return 0.0
    return float(H) ** ell * float(N) ** (kf - ell)


def envelope_constant(f: HardyExpr, k: int, ell: int,
                      grid: list, t0: int = DEFAULT_T0) -> float:
    """Fitted constant C with measured B <= C * H^ell * N^(k-ell) on the grid.

    ``grid`` holds (N, H) pairs; the returned C is the max measured ratio.
    """
    best = 0.0
    for N, H in grid:
        tm = taylor_model(f, N, ell, H, t0=t0)
        env = remainder_envelope(f, k, ell, N, H)
        if env > 0:
            best = max(best, tm.remainder_bound_float() / env)
    return best


def taylor_length(k: int, requested: Optional[int] = None,
                  preset: str = "minimal") -> int:
    """Default model length for a growth bound k.

    "minimal" gives max(k+1, requested): the least length with a decaying
    remainder envelope.  "correlation" gives max(10*k, requested), the
    aggressive choice used when far-out windows must stay far below 1.
    """
    if k < 0:
        raise DomainError("growth bound k must be non-negative")
    if preset == "minimal":
        base = k + 1
    elif preset == "correlation":
        base = 10 * max(k, 1)
    else:
        raise DomainError(f"unknown preset {preset!r}")
    return max(base, requested or 0)


# ---------------------------------------------------------------------------
# Index sources for words along growth functions


@dataclass(frozen=True)
class FloorIndex:
    """Index source n -> floor(f(start + n)): feeds words along a growth function.

    The identity map and pure rational powers of t vectorise; anything else
    falls back to per-index certified floors.
    """

    f: HardyExpr
    start: int = 0

    def indices(self, count: int):
        import numpy as np

        from .exactreal import floor_certified, floor_power_array

        n = self.start + np.arange(count, dtype=np.int64)
        if isinstance(self.f, HVar):
            return n
        if isinstance(self.f, HPow) and isinstance(self.f.base, HVar):
            return floor_power_array(n, self.f.exponent)
        return np.array(
            [floor_certified(eval_hardy(self.f, int(m))) for m in n], dtype=np.int64
        )

    def describe(self) -> str:
        return f"floor({hardy_to_text(self.f)}) from {self.start}"
