"""Bracket expressions: parser, certified evaluation, codings, words."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bracketlab import exactreal as xr
from bracketlab import gp_core as gp
from bracketlab.errors import CodingGap, DomainError, ParseError


class TestParser:
    def test_direct_trees(self):
        e = gp.parse_gp("floor(sqrt(2)*n)")
        assert e == gp.GPFloor(gp.gp_mul(gp.GPConst(xr.ConstantTag.sqrt(2)), gp.GPVar()))

    def test_frac_square(self):
        e = gp.parse_gp("frac(1/2*n^2)")
        want = gp.GPFrac(gp.gp_mul(gp.gp_rational(1, 2), gp.GPPow(gp.GPVar(), 2)))
        assert e == want

    def test_nested_floors(self):
        e = gp.parse_gp("floor(sqrt(2)*n*floor(sqrt(3)*n))")
        assert isinstance(e, gp.GPFloor)
        inner = e.child
        assert isinstance(inner, gp.GPMul)
        assert any(isinstance(c, gp.GPFloor) for c in inner.children)

    def test_whitespace_insensitive(self):
        assert gp.parse_gp(" floor( sqrt(2) * n )") == gp.parse_gp("floor(sqrt(2)*n)")

    def test_left_associative(self):
        # 1 - 2 - 3 = (1-2) - 3 = -4
        assert gp.eval_gp(gp.parse_gp("1 - 2 - 3"), 0).exact_value == Fraction(-4)
        assert gp.eval_gp(gp.parse_gp("2*3*4"), 0).exact_value == Fraction(24)

    def test_error_offset_and_expected(self):
        with pytest.raises(ParseError) as err:
            gp.parse_gp("floor(2*)")
        assert err.value.offset == 8
        assert any("n" in e for e in err.value.expected)
        with pytest.raises(ParseError) as err:
            gp.parse_gp("sqrt(x)")
        assert err.value.offset == 5

    def test_division_only_by_rational_constants(self):
        assert gp.parse_gp("n/2") == gp.gp_mul(gp.gp_rational(1, 2), gp.GPVar())
        with pytest.raises(ParseError):
            gp.parse_gp("1/n")
        with pytest.raises(ParseError):
            gp.parse_gp("n/sqrt(2)")

    def test_sqrt_validation_surfaces(self):
        with pytest.raises(DomainError):
            gp.parse_gp("sqrt(4)")


def _random_expr(rng: random.Random, depth: int, rational_only: bool = True):
    roll = rng.random()
    if depth == 0 or roll < 0.25:
        if rng.random() < 0.4:
            return gp.GPVar()
        if rational_only or rng.random() < 0.7:
            return gp.gp_rational(rng.randrange(-30, 30), rng.randrange(1, 12))
        return gp.GPConst(xr.ConstantTag.sqrt(rng.choice([2, 3, 5])))
    if roll < 0.45:
        return gp.gp_add(_random_expr(rng, depth - 1, rational_only),
                         _random_expr(rng, depth - 1, rational_only))
    if roll < 0.65:
        return gp.gp_mul(_random_expr(rng, depth - 1, rational_only),
                         _random_expr(rng, depth - 1, rational_only))
    if roll < 0.75:
        return gp.gp_pow(_random_expr(rng, depth - 1, rational_only), rng.randrange(2, 4))
    if roll < 0.9:
        return gp.GPFloor(_random_expr(rng, depth - 1, rational_only))
    return gp.GPFrac(_random_expr(rng, depth - 1, rational_only))


def _naive_rational_eval(e, n: int) -> Fraction:
    """Independent big-rational tree walk (rational constants only)."""
    if isinstance(e, gp.GPConst):
        assert e.tag.kind == "rational"
        return Fraction(e.tag.p, e.tag.q)
    if isinstance(e, gp.GPVar):
        return Fraction(n)
    if isinstance(e, gp.GPAdd):
        return sum((_naive_rational_eval(c, n) for c in e.children), Fraction(0))
    if isinstance(e, gp.GPMul):
        out = Fraction(1)
        for c in e.children:
            out *= _naive_rational_eval(c, n)
        return out
    if isinstance(e, gp.GPPow):
        return _naive_rational_eval(e.base, n) ** e.exponent
    if isinstance(e, gp.GPFloor):
        v = _naive_rational_eval(e.child, n)
        return Fraction(v.numerator // v.denominator)
    if isinstance(e, gp.GPFrac):
        v = _naive_rational_eval(e.child, n)
        return v - (v.numerator // v.denominator)
    raise AssertionError(e)


class TestEval:
    def test_spec_values(self):
        assert gp.eval_gp(gp.parse_gp("floor(sqrt(2)*n*floor(sqrt(3)*n))"), 1).exact_value == 1
        assert gp.eval_gp(gp.parse_gp("frac(1/3*n)"), 4).exact_value == Fraction(1, 3)

    def test_rational_exactness_against_naive_oracle(self):
        rng = random.Random(99)
        done = 0
        while done < 10_000:
            e = _random_expr(rng, rng.randrange(1, 4))
            n = rng.randrange(-50, 50)
            want = _naive_rational_eval(e, n)
            got = gp.eval_gp(e, n).exact_value
            assert got == want, (gp.to_text(e), n)
            done += 1

    def test_memo_shares_subtrees(self):
        e = gp.parse_gp("floor(sqrt(2)*n) + floor(sqrt(2)*n)")
        memo = {}
        v = gp.eval_gp(e, 5, memo)
        assert v.exact_value == 14
        floor_hits = [k for k in memo if isinstance(k[0], gp.GPFloor)]
        assert len(floor_hits) == 1  # structural dedupe

    def test_frac_floor_identity(self):
        rng = random.Random(5)
        for _ in range(200):
            e = _random_expr(rng, 2)
            n = rng.randrange(-20, 20)
            fr = gp.eval_gp(gp.GPFrac(e), n)
            whole = gp.eval_gp(e, n)
            fl = gp.eval_gp(gp.GPFloor(e), n)
            diff = whole - fl - fr
            assert diff.lower <= 0 <= diff.upper

    def test_irrational_constants_certified(self):
        e = gp.parse_gp("floor((sqrt(2)-1)*n)")
        for n in range(100):
            got = gp.eval_gp(e, n).exact_value
            want = math.floor((math.sqrt(2) - 1) * n)
            assert got == want


class TestPrintParseRoundTrip:
    def test_canonical_round_trip_random(self):
        rng = random.Random(123)
        for _ in range(500):
            e = _random_expr(rng, 3, rational_only=False)
            text = gp.to_text(e)
            again = gp.parse_gp(text)
            assert again == e, text

    def test_round_trip_from_text(self):
        for text in [
            "floor(sqrt(2)*n)",
            "frac(1/2*n^2)",
            "floor((sqrt(2) - 1)*(n + 1)) - floor((sqrt(2) - 1)*n)",
            "n^3 + 2*n - 5",
        ]:
            e = gp.parse_gp(text)
            assert gp.parse_gp(gp.to_text(e)) == e


class TestSturmian:
    def test_values_at_small_n(self):
        e = gp.sturmian_expr("sqrt(2)-1", 0)
        assert gp.eval_gp(e, 1).exact_value == 0
        assert gp.eval_gp(e, 2).exact_value == 1

    def test_rational_slope_periodic(self):
        e = gp.sturmian_expr(Fraction(1, 2), 0)
        w = gp.generate_word(e, None, gp.IndexRange(), 10)
        assert w.symbols() == [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            gp.sturmian_expr(Fraction(3, 2), 0)
        with pytest.raises(DomainError):
            gp.sturmian_expr("sqrt(2)-1", 1)
        with pytest.raises(DomainError):
            gp.sturmian_expr("sqrt(2)", 0)  # sqrt(2) > 1

    def test_two_letter_property(self):
        for alpha in ("sqrt(2)-1", "sqrt(3)-1", "(sqrt(5)-1)/2"):
            e = gp.sturmian_expr(alpha, 0)
            w = gp.generate_word(e, None, gp.IndexRange(), 100_000)
            assert set(np.unique(w.codes)) <= {0, 1}
            assert set(w.alphabet) <= {0, 1}

    def test_two_sided_window(self):
        e = gp.sturmian_expr("sqrt(2)-1", Fraction(1, 3))
        w = gp.generate_word(e, None, gp.IndexRange(start=-50), 100)
        alpha = math.sqrt(2) - 1
        beta = 1 / 3
        want = [
            math.floor(alpha * (n + 1) + beta) - math.floor(alpha * n + beta)
            for n in range(-50, 50)
        ]
        assert w.symbols() == want


class TestCodings:
    def test_residue_example(self):
        w = gp.generate_word(gp.parse_gp("floor(n/2)"), gp.parse_coding("mod 2"),
                             gp.IndexRange(), 6)
        assert w.symbols() == [0, 0, 1, 1, 0, 0]

    def test_constant_word(self):
        w = gp.generate_word(gp.parse_gp("3"), None, gp.IndexRange(), 5)
        assert w.symbols() == [3] * 5

    def test_interval_coding(self):
        coding = gp.parse_coding("cells [0,1/2)->a [1/2,1)->b")
        w = gp.generate_word(gp.parse_gp("frac(1/3*n)"), coding, gp.IndexRange(), 6)
        assert w.symbols() == ["a", "a", "b", "a", "a", "b"]

    def test_interval_coding_validation(self):
        with pytest.raises(DomainError):
            gp.IntervalCoding(((Fraction(0), Fraction(1, 2), "a"),
                               (Fraction(1, 4), Fraction(1), "b")))
        with pytest.raises(DomainError):
            gp.IntervalCoding(((Fraction(0), Fraction(1, 4), "a"),
                               (Fraction(1, 2), Fraction(1), "b")))

    def test_residue_requires_integers(self):
        coding = gp.parse_coding("mod 2")
        with pytest.raises(CodingGap):
            gp.generate_word(gp.parse_gp("frac(1/3*n)"), coding, gp.IndexRange(), 4)

    def test_residue_label_cover(self):
        with pytest.raises(DomainError):
            gp.ResidueCoding(3, ("a", "b"))

    def test_coding_gap_outside_range(self):
        coding = gp.IntervalCoding(((Fraction(0), Fraction(1, 2), "a"),))
        with pytest.raises(CodingGap):
            gp.generate_word(gp.parse_gp("frac(1/3*n)"), coding, gp.IndexRange(), 4)


class TestFastPathAgreement:
    def test_vectorised_equals_generic(self):
        e = gp.sturmian_expr("sqrt(2)-1", Fraction(1, 7))
        fast = gp.generate_word(e, None, gp.IndexRange(), 500)
        slow_symbols = [gp.eval_gp(e, n).exact_value for n in range(500)]
        assert fast.symbols() == slow_symbols

    def test_explicit_index_array(self):
        e = gp.sturmian_expr("sqrt(2)-1", 0)
        idx = np.array([5, 1, 1, 3], dtype=np.int64)
        w = gp.generate_word(e, None, idx, 4)
        vals = [gp.eval_gp(e, int(m)).exact_value for m in idx]
        assert w.symbols() == vals


@given(st.integers(min_value=-1000, max_value=1000),
       st.integers(min_value=1, max_value=60))
@settings(max_examples=120, deadline=None)
def test_floor_n_over_q_matches_python(n, q):
    e = gp.parse_gp(f"floor(n/{q})")
    assert gp.eval_gp(e, n).exact_value == n // q


class TestFloorUndecidableInGrammar:
    def test_exact_integer_in_disguise_raises_with_path(self):
        from bracketlab.errors import FloorUndecidable

        # sqrt(2)*sqrt(8) = 4 exactly, but the two surds live in different
        # quadratic layers and the product only ever has an enclosure
        e = gp.parse_gp("floor(sqrt(2)*sqrt(8))")
        with pytest.raises(FloorUndecidable) as err:
            gp.eval_gp(e, 0)
        assert "floor" in "/".join(err.value.path)
