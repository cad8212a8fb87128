"""Bracket expressions: parsing, certified evaluation, and word generation.

A bracket expression is built from rational/surd constants and the integer
variable ``n`` using ``+``, ``*``, non-negative integer powers, ``floor`` and
``frac``.  Evaluation is certified (exact whenever every constant is
rational) and words are produced by composing an expression with a
letter-to-letter coding along a chosen index sequence.

Grammar (whitespace-insensitive, operators left-associative)::

    expr   := ["-"] term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := atom ("^" uint)?
    atom   := uint | "sqrt(" uint ")" | "pi" | "e" | "n"
            | "floor(" expr ")" | "frac(" expr ")" | "(" expr ")"

Division is accepted only by a nonzero rational constant (it folds into a
multiplication, keeping the AST inside the bracket-expression signature);
``1/2*n`` and ``floor(n/2)`` both parse.

Coding syntax: ``mod <m>``, ``cells [0,1/2)->a [1/2,1)->b`` or ``identity``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CodingGap, DomainError, ParseError
from .exactreal import (
    AdaptiveReal,
    ConstantTag,
    certified_cmp,
    floor_affine_array,
    floor_certified,
    frac_certified,
)

__all__ = [
    "BracketExpr",
    "GPAdd",
    "GPConst",
    "GPFloor",
    "GPFrac",
    "GPMul",
    "GPPow",
    "GPVar",
    "IdentityCoding",
    "IndexRange",
    "IntervalCoding",
    "ResidueCoding",
    "Word",
    "eval_gp",
    "generate_word",
    "parse_coding",
    "parse_gp",
    "sturmian_expr",
    "to_text",
]


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class GPConst:
    tag: ConstantTag


@dataclass(frozen=True)
class GPVar:
    pass


@dataclass(frozen=True)
class GPAdd:
    children: tuple


@dataclass(frozen=True)
class GPMul:
    children: tuple


@dataclass(frozen=True)
class GPPow:
    base: "BracketExpr"
    exponent: int


@dataclass(frozen=True)
class GPFloor:
    child: "BracketExpr"


@dataclass(frozen=True)
class GPFrac:
    child: "BracketExpr"


BracketExpr = Union[GPConst, GPVar, GPAdd, GPMul, GPPow, GPFloor, GPFrac]

_N = GPVar()


def gp_rational(p: int, q: int = 1) -> GPConst:
    return GPConst(ConstantTag.rational(p, q))


def _is_rat(e) -> bool:
    return isinstance(e, GPConst) and e.tag.kind == "rational"


def _rat_of(e: GPConst) -> Fraction:
    return Fraction(e.tag.p, e.tag.q)


def gp_add(*parts) -> BracketExpr:
    """Flattening sum constructor; folds rational constants, drops zeros."""
    flat: list = []
    acc = Fraction(0)
    for p in parts:
        if isinstance(p, GPAdd):
            for c in p.children:
                if _is_rat(c):
                    acc += _rat_of(c)
                else:
                    flat.append(c)
        elif _is_rat(p):
            acc += _rat_of(p)
        else:
            flat.append(p)
    if acc != 0 or not flat:
        flat.append(gp_rational(acc.numerator, acc.denominator))
    if len(flat) == 1:
        return flat[0]
    return GPAdd(tuple(flat))


def gp_mul(*parts) -> BracketExpr:
    """Flattening product constructor; folds rational coefficients."""
    flat: list = []
    acc = Fraction(1)
    for p in parts:
        if isinstance(p, GPMul):
            for c in p.children:
                if _is_rat(c):
                    acc *= _rat_of(c)
                else:
                    flat.append(c)
        elif _is_rat(p):
            acc *= _rat_of(p)
        else:
            flat.append(p)
    if acc == 0:
        return gp_rational(0)
    if acc != 1 or not flat:
        flat.insert(0, gp_rational(acc.numerator, acc.denominator))
    if len(flat) == 1:
        return flat[0]
    return GPMul(tuple(flat))


def gp_neg(e: BracketExpr) -> BracketExpr:
    if _is_rat(e):
        r = -_rat_of(e)
        return gp_rational(r.numerator, r.denominator)
    if isinstance(e, GPMul) and _is_rat(e.children[0]):
        r = -_rat_of(e.children[0])
        return gp_mul(gp_rational(r.numerator, r.denominator), *e.children[1:])
    return gp_mul(gp_rational(-1), e)


def gp_pow(base: BracketExpr, exponent: int) -> BracketExpr:
    if exponent < 0:
        raise DomainError("bracket expressions allow only non-negative integer powers")
    if exponent == 0:
        return gp_rational(1)
    if exponent == 1:
        return base
    if _is_rat(base):
        r = _rat_of(base) ** exponent
        return gp_rational(r.numerator, r.denominator)
    return GPPow(base, exponent)


# ---------------------------------------------------------------------------
# Tokenizer (shared with the growth-function grammar in hardy.py)

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|([-+*/^()\[\],<>])|(.))")


def tokenize(text: str):
    """Yield (kind, value, offset) triples; kind in {'int','name','op'}."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # pragma: no cover - regex always matches something
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            out.append(("op", m.group(3), m.start(3)))
        elif m.group(4).strip():
            raise ParseError(m.start(4), frozenset({"token"}), m.group(4))
        pos = m.end()
    return out


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next_if(self, kind: str, value: Optional[str] = None):
        t = self.peek()
        if t and t[0] == kind and (value is None or t[1] == value):
            self.i += 1
            return t
        return None

    def expect(self, kind: str, value: Optional[str] = None, expected: str = ""):
        t = self.next_if(kind, value)
        if t is None:
            self.fail({expected or value or kind})
        return t

    def fail(self, expected):
        t = self.peek()
        offset = t[2] if t else len(self.text)
        found = t[1] if t else ""
        raise ParseError(offset, frozenset(expected), found)


# ---------------------------------------------------------------------------
# Parser


def parse_gp(text: str) -> BracketExpr:
    """Parse a bracket expression; raises :class:`ParseError` with offset."""
    toks = _Tokens(text)
    expr = _parse_gp_expr(toks)
    if toks.peek() is not None:
        toks.fail({"end of input", "+", "-", "*", "/", "^"})
    return expr


def _parse_gp_expr(toks: _Tokens) -> BracketExpr:
    negate = toks.next_if("op", "-") is not None
    acc = _parse_gp_term(toks)
    if negate:
        acc = gp_neg(acc)
    while True:
        if toks.next_if("op", "+"):
            acc = gp_add(acc, _parse_gp_term(toks))
        elif toks.next_if("op", "-"):
            acc = gp_add(acc, gp_neg(_parse_gp_term(toks)))
        else:
            return acc


def _parse_gp_term(toks: _Tokens) -> BracketExpr:
    acc = _parse_gp_factor(toks)
    while True:
        if toks.next_if("op", "*"):
            acc = gp_mul(acc, _parse_gp_factor(toks))
        elif toks.next_if("op", "/"):
            t = toks.peek()
            rhs = _parse_gp_factor(toks)
            if not _is_rat(rhs) or _rat_of(rhs) == 0:
                offset = t[2] if t else len(toks.text)
                raise ParseError(
                    offset, frozenset({"nonzero rational constant divisor"}),
                    t[1] if t else "",
                )
            r = 1 / _rat_of(rhs)
            acc = gp_mul(acc, gp_rational(r.numerator, r.denominator))
        else:
            return acc


def _parse_gp_factor(toks: _Tokens) -> BracketExpr:
    atom = _parse_gp_atom(toks)
    if toks.next_if("op", "^"):
        t = toks.expect("int", expected="unsigned integer exponent")
        return gp_pow(atom, int(t[1]))
    return atom


def _parse_gp_atom(toks: _Tokens) -> BracketExpr:
    t = toks.peek()
    if t is None:
        toks.fail({"number", "n", "pi", "e", "sqrt(", "floor(", "frac(", "("})
    kind, value, _ = t
    if kind == "int":
        toks.i += 1
        return gp_rational(int(value))
    if kind == "op" and value == "(":
        toks.i += 1
        inner = _parse_gp_expr(toks)
        toks.expect("op", ")")
        return inner
    if kind == "name":
        toks.i += 1
        if value == "n":
            return _N
        if value == "pi":
            return GPConst(ConstantTag.pi())
        if value == "e":
            return GPConst(ConstantTag.euler_e())
        if value == "sqrt":
            toks.expect("op", "(")
            arg = toks.expect("int", expected="unsigned integer")
            toks.expect("op", ")")
            return GPConst(ConstantTag.sqrt(int(arg[1])))
        if value == "floor":
            toks.expect("op", "(")
            inner = _parse_gp_expr(toks)
            toks.expect("op", ")")
            return GPFloor(inner)
        if value == "frac":
            toks.expect("op", "(")
            inner = _parse_gp_expr(toks)
            toks.expect("op", ")")
            return GPFrac(inner)
    toks.fail({"number", "n", "pi", "e", "sqrt(", "floor(", "frac(", "("})


# ---------------------------------------------------------------------------
# Printer (inverse of the parser on canonical trees)

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_POW, _LEVEL_ATOM = 0, 1, 2, 3


def to_text(expr: BracketExpr) -> str:
    return _print(expr, _LEVEL_ADD)


def _print(e: BracketExpr, level: int) -> str:
    if isinstance(e, GPConst):
        s = str(e.tag)
        if e.tag.kind == "rational" and e.tag.p < 0 and level > _LEVEL_ADD:
            return f"({s})"
        return s
    if isinstance(e, GPVar):
        return "n"
    if isinstance(e, GPFloor):
        return f"floor({_print(e.child, _LEVEL_ADD)})"
    if isinstance(e, GPFrac):
        return f"frac({_print(e.child, _LEVEL_ADD)})"
    if isinstance(e, GPPow):
        return _wrap(f"{_print(e.base, _LEVEL_ATOM)}^{e.exponent}", _LEVEL_POW, level)
    if isinstance(e, GPMul):
        parts = [_print(e.children[0], _LEVEL_POW)]
        for c in e.children[1:]:
            parts.append(_print(c, _LEVEL_POW))
        return _wrap("*".join(parts), _LEVEL_MUL, level)
    if isinstance(e, GPAdd):
        out = _print(e.children[0], _LEVEL_MUL)
        for c in e.children[1:]:
            neg = _negative_leading(c)
            if neg is not None:
                out += " - " + _print(neg, _LEVEL_MUL)
            else:
                out += " + " + _print(c, _LEVEL_MUL)
        return _wrap(out, _LEVEL_ADD, level)
    raise TypeError(f"not a bracket expression: {e!r}")


def _negative_leading(e: BracketExpr) -> Optional[BracketExpr]:
    """If e prints with a leading minus, return its negation; else None."""
    if _is_rat(e) and _rat_of(e) < 0:
        return gp_neg(e)
    if isinstance(e, GPMul) and _is_rat(e.children[0]) and _rat_of(e.children[0]) < 0:
        return gp_neg(e)
    return None


def _wrap(s: str, mine: int, required: int) -> str:
    return f"({s})" if mine < required else s


# ---------------------------------------------------------------------------
# Evaluation


def eval_gp(expr: BracketExpr, n: int, memo: Optional[dict] = None) -> AdaptiveReal:
    """Certified value of the expression at integer n.

    Exact whenever every constant in the expression is rational.  The memo
    (one per evaluation context) dedupes structurally equal subtrees, so
    floors of shared subexpressions are certified once.
    """
    if memo is None:
        memo = {}
    return _eval(expr, n, memo, ())


def _eval(e: BracketExpr, n: int, memo: dict, path: tuple) -> AdaptiveReal:
    key = (e, n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(e, GPConst):
        val = e.tag.as_real()
    elif isinstance(e, GPVar):
        val = AdaptiveReal(n)
    elif isinstance(e, GPAdd):
        val = _eval(e.children[0], n, memo, path + ("add.0",))
        for i, c in enumerate(e.children[1:], start=1):
            val = val + _eval(c, n, memo, path + (f"add.{i}",))
    elif isinstance(e, GPMul):
        val = _eval(e.children[0], n, memo, path + ("mul.0",))
        for i, c in enumerate(e.children[1:], start=1):
            val = val * _eval(c, n, memo, path + (f"mul.{i}",))
    elif isinstance(e, GPPow):
        val = _eval(e.base, n, memo, path + ("pow",)) ** e.exponent
    elif isinstance(e, GPFloor):
        inner = _eval(e.child, n, memo, path + ("floor",))
        val = AdaptiveReal(floor_certified(inner, path + ("floor",)))
    elif isinstance(e, GPFrac):
        inner = _eval(e.child, n, memo, path + ("frac",))
        val = frac_certified(inner, path + ("frac",))
    else:
        raise TypeError(f"not a bracket expression: {e!r}")
    memo[key] = val
    return val


def _const_value(e: BracketExpr) -> Optional[AdaptiveReal]:
    """Value of a constant (n-free) expression, or None if it contains n."""
    if _contains_var(e):
        return None
    return eval_gp(e, 0)


def _contains_var(e: BracketExpr) -> bool:
    if isinstance(e, GPVar):
        return True
    if isinstance(e, (GPAdd, GPMul)):
        return any(_contains_var(c) for c in e.children)
    if isinstance(e, GPPow):
        return _contains_var(e.base)
    if isinstance(e, (GPFloor, GPFrac)):
        return _contains_var(e.child)
    return False


# ---------------------------------------------------------------------------
# Sturmian expressions


def _as_const_expr(x) -> BracketExpr:
    if isinstance(x, str):
        e = parse_gp(x)
    elif isinstance(x, ConstantTag):
        e = GPConst(x)
    elif isinstance(x, int):
        e = gp_rational(x)
    elif isinstance(x, Fraction):
        e = gp_rational(x.numerator, x.denominator)
    else:
        e = x
    if _contains_var(e):
        raise DomainError("expected a constant expression without n")
    return e


def sturmian_expr(alpha, beta=0) -> BracketExpr:
    """The two-floor word formula ``floor(a(n+1)+b) - floor(a*n+b)``.

    Requires alpha in (0,1) and beta in [0,1); the checks are certified.
    With irrational alpha the generated word takes exactly the two values
    {0, 1}.
    """
    a = _as_const_expr(alpha)
    b = _as_const_expr(beta)
    av, bv = _const_value(a), _const_value(b)
    if certified_cmp(av, 0) <= 0 or certified_cmp(av, 1) >= 0:
        raise DomainError("sturmian coefficient must lie strictly between 0 and 1")
    if certified_cmp(bv, 0) < 0 or certified_cmp(bv, 1) >= 0:
        raise DomainError("sturmian offset must lie in [0, 1)")
    shifted = gp_add(gp_mul(a, gp_add(_N, gp_rational(1))), b)
    straight = gp_add(gp_mul(a, _N), b)
    return gp_add(GPFloor(shifted), gp_neg(GPFloor(straight)))


# ---------------------------------------------------------------------------
# Codings


@dataclass(frozen=True)
class ResidueCoding:
    """Labels certified-integer values by residue class modulo m."""

    modulus: int
    labels: tuple

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError("residue coding needs modulus >= 2")
        if len(self.labels) != self.modulus:
            raise DomainError("residue coding must label every class 0..m-1")

    @property
    def alphabet(self) -> tuple:
        return tuple(dict.fromkeys(self.labels))

    def apply(self, value: AdaptiveReal):
        ex = value.exact_value
        if not isinstance(ex, Fraction) or ex.denominator != 1:
            raise CodingGap("residue coding applies to certified integer values only")
        return self.labels[ex.numerator % self.modulus]


@dataclass(frozen=True)
class IntervalCoding:
    """Labels values by disjoint closed-open rational cells covering a range."""

    cells: tuple  # of (Fraction lo, Fraction hi, label)

    def __post_init__(self):
        cells = tuple(sorted(self.cells, key=lambda c: c[0]))
        for lo, hi, _ in cells:
            if not lo < hi:
                raise DomainError("interval coding cells must be non-empty")
        for (_, hi1, _), (lo2, _, _) in zip(cells, cells[1:]):
            if hi1 > lo2:
                raise DomainError("interval coding cells overlap")
            if hi1 < lo2:
                raise DomainError("interval coding cells leave a gap in the range")
        object.__setattr__(self, "cells", cells)

    @property
    def alphabet(self) -> tuple:
        return tuple(dict.fromkeys(c[2] for c in self.cells))

    def apply(self, value: AdaptiveReal):
        for lo, hi, label in self.cells:
            if certified_cmp(value, lo) >= 0 and certified_cmp(value, hi) < 0:
                return label
        raise CodingGap(f"value near {value.midpoint_float()} falls in no coding cell")


@dataclass(frozen=True)
class IdentityCoding:
    """Certified-integer values are their own symbols."""

    def apply(self, value: AdaptiveReal):
        ex = value.exact_value
        if not isinstance(ex, Fraction) or ex.denominator != 1:
            raise CodingGap("identity coding applies to certified integer values only")
        return ex.numerator


Coding = Union[ResidueCoding, IntervalCoding, IdentityCoding]

_CELL_RE = re.compile(r"\[([^,\]]+),([^)\]]+)\)\s*->\s*(\S+)")


def parse_coding(text: str) -> Coding:
    text = text.strip()
    if text == "identity":
        return IdentityCoding()
    if text.startswith("mod"):
        rest = text[3:].strip()
        if not rest.isdigit():
            raise ParseError(3, frozenset({"modulus"}), rest)
        m = int(rest)
        return ResidueCoding(m, tuple(range(m)))
    if text.startswith("cells"):
        cells = []
        for m in _CELL_RE.finditer(text):
            lo = _parse_bound(m.group(1))
            hi = _parse_bound(m.group(2))
            cells.append((lo, hi, m.group(3)))
        if not cells:
            raise ParseError(0, frozenset({"[lo,hi)->label"}), text)
        return IntervalCoding(tuple(cells))
    raise ParseError(0, frozenset({"mod <m>", "cells ...", "identity"}), text)


def _parse_bound(s: str) -> Fraction:
    return Fraction(s.strip())


# ---------------------------------------------------------------------------
# Words


@dataclass(frozen=True)
class Word:
    """A finite word: alphabet, symbol codes and provenance metadata.

    ``codes`` holds indices into ``alphabet``; :meth:`symbols` decodes them.
    """

    alphabet: tuple
    codes: np.ndarray
    origin: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.codes)

    def symbols(self) -> list:
        return [self.alphabet[c] for c in self.codes]

    @staticmethod
    def from_symbols(symbols: Sequence, alphabet: Optional[tuple] = None,
                     origin: Optional[dict] = None) -> "Word":
        if alphabet is None:
            distinct = set(symbols)
            if all(isinstance(s, (int, np.integer)) for s in distinct):
                alphabet = tuple(int(s) for s in sorted(distinct))
            else:
                alphabet = tuple(sorted(distinct, key=repr))
        index = {s: i for i, s in enumerate(alphabet)}
        try:
            codes = np.fromiter((index[s] for s in symbols), dtype=np.int64,
                                count=len(symbols))
        except KeyError as exc:
            raise DomainError(f"symbol {exc.args[0]!r} not in alphabet") from exc
        return Word(alphabet, codes, origin or {})


@dataclass(frozen=True)
class IndexRange:
    """Indices start, start+step, ... (two-sided words use negative starts)."""

    start: int = 0
    step: int = 1

    def indices(self, count: int) -> np.ndarray:
        return self.start + self.step * np.arange(count, dtype=np.int64)

    def describe(self) -> str:
        return f"n = {self.start} + {self.step}*i"


def _resolve_indices(index_source, count: int) -> tuple[np.ndarray, str]:
    if index_source is None:
        index_source = IndexRange()
    if hasattr(index_source, "indices"):
        desc = index_source.describe() if hasattr(index_source, "describe") else repr(index_source)
        return np.asarray(index_source.indices(count), dtype=np.int64), desc
    arr = np.asarray(index_source, dtype=np.int64)
    if len(arr) < count:
        raise DomainError("explicit index sequence shorter than the requested count")
    return arr[:count], "explicit index array"


def generate_word(expr: BracketExpr, coding: Optional[Coding], index_source,
                  count: int) -> Word:
    """Deterministic word of ``count`` symbols: coding(expr value) per index.

    A vectorised path handles integer combinations of floors of affine forms
    (which covers the two-floor word formula); everything else evaluates
    index by index with certified arithmetic.
    """
    if coding is None:
        coding = IdentityCoding()
    idx, desc = _resolve_indices(index_source, count)
    origin = {
        "expression": to_text(expr),
        "coding": repr(coding),
        "index_source": desc,
        "count": count,
    }
    values = _fast_int_values(expr, idx)
    if values is not None and not isinstance(coding, IntervalCoding):
        if isinstance(coding, ResidueCoding):
            labels = coding.labels
            codes_raw = values % coding.modulus
            alphabet = coding.alphabet
            remap = np.array([alphabet.index(labels[r]) for r in range(coding.modulus)],
                             dtype=np.int64)
            return Word(alphabet, remap[codes_raw], origin)
        uniq = np.unique(values)
        alphabet = tuple(int(u) for u in uniq)
        codes = np.searchsorted(uniq, values)
        return Word(alphabet, codes.astype(np.int64), origin)
    symbols = []
    for m in idx:
        value = eval_gp(expr, int(m))
        symbols.append(coding.apply(value))
    alphabet = coding.alphabet if hasattr(coding, "alphabet") else None
    return Word.from_symbols(symbols, alphabet, origin)


# -- vectorised evaluation of integer floor combinations ----------------------


def _affine_parts(e: BracketExpr) -> Optional[tuple]:
    """Decompose an n-affine, floor-free expression as (slope, offset) values."""
    if isinstance(e, GPVar):
        return AdaptiveReal(1), AdaptiveReal(0)
    if isinstance(e, GPConst):
        return AdaptiveReal(0), e.tag.as_real()
    if isinstance(e, GPAdd):
        slope, offset = AdaptiveReal(0), AdaptiveReal(0)
        for c in e.children:
            p = _affine_parts(c)
            if p is None:
                return None
            slope, offset = slope + p[0], offset + p[1]
        return slope, offset
    if isinstance(e, GPMul):
        slope, offset = AdaptiveReal(0), AdaptiveReal(1)
        for c in e.children:
            p = _affine_parts(c)
            if p is None:
                return None
            cs, co = p
            s_is_zero = slope.exact_value == 0
            c_is_zero = cs.exact_value == 0
            if not s_is_zero and not c_is_zero:
                return None  # degree two
            slope = slope * co + cs * offset
            offset = offset * co
        return slope, offset
    return None


def _fast_int_values(e: BracketExpr, idx: np.ndarray) -> Optional[np.ndarray]:
    """Values of Σ c_i*floor(affine_i) + (integer affine) as an int64 array."""
    terms: list = []

    def collect(node, coeff: Fraction) -> bool:
        if isinstance(node, GPAdd):
            return all(collect(c, coeff) for c in node.children)
        if isinstance(node, GPMul):
            rats = [c for c in node.children if _is_rat(c)]
            rest = [c for c in node.children if not _is_rat(c)]
            r = coeff
            for c in rats:
                r *= _rat_of(c)
            if len(rest) == 1 and isinstance(rest[0], GPFloor):
                return collect(rest[0], r)
            if not rest:
                terms.append(("const", r, None))
                return True
            return False
        if isinstance(node, GPFloor):
            p = _affine_parts(node.child)
            if p is None:
                return False
            terms.append(("floor", coeff, p))
            return True
        if _is_rat(node):
            terms.append(("const", coeff * _rat_of(node), None))
            return True
        if isinstance(node, GPVar):
            terms.append(("var", coeff, None))
            return True
        return False

    if not collect(e, Fraction(1)):
        return None
    for kind, coeff, _ in terms:
        if kind in ("floor", "var") and coeff.denominator != 1:
            return None
    const_sum = sum((c for k, c, _ in terms if k == "const"), Fraction(0))
    if const_sum.denominator != 1:
        return None
    total = np.full(len(idx), int(const_sum), dtype=np.int64)
    for kind, coeff, payload in terms:
        if kind == "var":
            total = total + int(coeff) * idx
        elif kind == "floor":
            slope, offset = payload
            floors = floor_affine_array(slope, offset, idx)
            total = total + int(coeff) * floors
    return total
