"""Heisenberg group law, reduction, orbits and the circle suspension."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bracketlab import exactreal as xr
from bracketlab import gp_core as gp
from bracketlab import nilheis as nh
from bracketlab.errors import DomainError


def exact(g: nh.HeisElement):
    return tuple(v.exact_value for v in (g.x1, g.x2, g.x3))


def rand_rational_elem(rng: random.Random) -> nh.HeisElement:
    def r():
        return Fraction(rng.randrange(-60, 60), rng.randrange(1, 12))

    return nh.HeisElement.of(r(), r(), r())


class TestGroupLaw:
    def test_cross_term(self):
        g = nh.heis_mul(nh.HeisElement.of(Fraction(2, 3), 0, 0),
                        nh.HeisElement.of(0, Fraction(5, 7), 0))
        assert exact(g) == (Fraction(2, 3), Fraction(5, 7), Fraction(10, 21))

    def test_identity(self):
        g = nh.HeisElement.of(1, 2, 3)
        assert exact(nh.heis_mul(nh.heis_identity(), g)) == (1, 2, 3)
        assert exact(nh.heis_mul(g, nh.heis_identity())) == (1, 2, 3)

    def test_commutator(self):
        a, b = nh.HeisElement.of(1, 0, 0), nh.HeisElement.of(0, 1, 0)
        comm = nh.heis_mul(nh.heis_mul(a, b),
                           nh.heis_mul(nh.heis_inv(a), nh.heis_inv(b)))
        assert exact(comm) == (0, 0, 1)

    def test_group_axioms_random(self):
        rng = random.Random(2024)
        for _ in range(10_000):
            a, b, c = (rand_rational_elem(rng) for _ in range(3))
            lhs = nh.heis_mul(nh.heis_mul(a, b), c)
            rhs = nh.heis_mul(a, nh.heis_mul(b, c))
            assert exact(lhs) == exact(rhs)
            inv = nh.heis_inv(a)
            assert exact(nh.heis_mul(a, inv)) == (0, 0, 0)
            assert exact(nh.heis_mul(inv, a)) == (0, 0, 0)


class TestPow:
    def test_square(self):
        g = nh.HeisElement.of(Fraction(1, 3), Fraction(1, 5), Fraction(1, 7))
        assert exact(nh.heis_pow(g, 2)) == exact(nh.heis_mul(g, g))

    def test_zero_is_identity(self):
        g = nh.HeisElement.of(3, 4, 5)
        assert exact(nh.heis_pow(g, 0)) == (0, 0, 0)

    def test_negative_one_is_inverse(self):
        g = nh.HeisElement.of(Fraction(2, 3), Fraction(-1, 4), Fraction(5, 6))
        assert exact(nh.heis_pow(g, -1)) == exact(nh.heis_inv(g))

    def test_power_coherence(self):
        rng = random.Random(77)
        for _ in range(20):
            g = rand_rational_elem(rng)
            acc = nh.heis_identity()
            for n in range(51):
                assert exact(nh.heis_pow(g, n)) == exact(acc)
                acc = nh.heis_mul(acc, g)

    def test_power_coherence_deep(self):
        g = nh.HeisElement.of(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
        acc = nh.heis_identity()
        for n in range(1001):
            if n % 125 == 0:
                assert exact(nh.heis_pow(g, n)) == exact(acc)
            acc = nh.heis_mul(acc, g)

    def test_negative_powers(self):
        g = nh.HeisElement.of(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
        for n in (-1, -2, -7):
            want = nh.heis_inv(nh.heis_pow(g, -n))
            assert exact(nh.heis_pow(g, n)) == exact(want)


class TestReduce:
    def test_examples(self):
        pt, gamma = nh.heis_reduce(nh.HeisElement.of(Fraction(3, 2), 0, 0))
        assert tuple(v.exact_value for v in pt) == (Fraction(1, 2), 0, 0)
        assert gamma == (-1, 0, 0)
        pt, gamma = nh.heis_reduce(nh.HeisElement.of(Fraction(1, 2), Fraction(5, 4), 0))
        assert tuple(v.exact_value for v in pt) == (
            Fraction(1, 2), Fraction(1, 4), Fraction(1, 2))
        assert gamma == (0, -1, 1)

    def test_integer_coordinates(self):
        pt, gamma = nh.heis_reduce(nh.HeisElement.of(7, -3, 11))
        assert tuple(v.exact_value for v in pt) == (0, 0, 0)

    def test_soundness_random(self):
        rng = random.Random(555)
        for _ in range(10_000):
            g = rand_rational_elem(rng)
            pt, gamma = nh.heis_reduce(g)
            vals = tuple(v.exact_value for v in pt)
            assert all(0 <= v < 1 for v in vals)
            moved = nh.heis_mul(g, nh.lattice_element(*gamma))
            assert exact(moved) == vals
            # g^{-1} * lift(point) is the lattice element's inverse
            back = nh.heis_mul(nh.heis_inv(g), nh.HeisElement(*pt))
            bx = exact(back)
            assert all(v.denominator == 1 for v in bx)


class TestOrbit:
    def test_abelian_subtorus(self):
        alpha = (xr.sqrt(5) - 1) / 2
        seq = nh.NilPolySeq(nh.heis_identity(), nh.HeisElement.of(alpha, 0, 0),
                            nh.heis_identity())
        pts = nh.orbit_points_float(nh.poly_orbit(seq, 200))
        ref = (np.arange(200) * ((math.sqrt(5) - 1) / 2)) % 1.0
        assert np.allclose(pts[:, 0], ref)
        assert np.allclose(pts[:, 1:], 0)

    def test_central_rotation(self):
        gamma = xr.sqrt(2) - 1
        seq = nh.NilPolySeq(nh.heis_identity(), nh.HeisElement.of(0, 0, gamma),
                            nh.heis_identity())
        pts = nh.orbit_points_float(nh.poly_orbit(seq, 100))
        ref = (np.arange(100) * (math.sqrt(2) - 1)) % 1.0
        assert np.allclose(pts[:, 2], ref)
        assert np.allclose(pts[:, :2], 0)

    def test_closed_form_equals_incremental(self):
        seq = nh.NilPolySeq(
            nh.HeisElement.of(Fraction(1, 3), Fraction(1, 7), Fraction(2, 5)),
            nh.HeisElement.of(Fraction(3, 4), Fraction(2, 3), Fraction(1, 2)),
            nh.HeisElement.of(0, 0, Fraction(5, 9)),
        )
        closed = nh.poly_orbit(seq, 300)
        inc = nh.poly_orbit_incremental(seq, 300)
        for a, b in zip(closed, inc):
            assert tuple(x.exact_value for x in a) == tuple(x.exact_value for x in b)

    def test_central_constraint(self):
        with pytest.raises(DomainError):
            nh.NilPolySeq(nh.heis_identity(), nh.heis_identity(),
                          nh.HeisElement.of(1, 0, 0))

    def test_orbit_third_coordinate_bracket_expression(self):
        # third reduced coordinate of the (a,b,0) orbit against the bracket
        # expression read off from the reduction, and against iterated
        # multiplication as a second oracle
        a_text, b_text = "sqrt(2)-1", "sqrt(3)-1"
        a = xr.sqrt(2) - 1
        b = xr.sqrt(3) - 1
        seq = nh.NilPolySeq(nh.heis_identity(), nh.HeisElement(a, b, xr.AdaptiveReal(0)),
                            nh.heis_identity())
        expr = gp.parse_gp(
            f"frac((1/2*n^2 - 1/2*n)*({a_text})*({b_text})"
            f" - (({a_text})*n - floor(({a_text})*n))*floor(({b_text})*n))"
        )
        inc = nh.poly_orbit_incremental(seq, 150)
        for n in range(150):
            point = nh.heis_reduce(seq.at(n))[0]
            third = point[2]
            other = gp.eval_gp(expr, n)
            diff = third - other
            lo, hi = diff.lower, diff.upper
            assert lo <= 0 <= hi or abs(diff.midpoint_float()) < 1e-20
            also = inc[n][2]
            assert abs(also.midpoint_float() - third.midpoint_float()) < 1e-20


class TestEquidistributionStats:
    def test_golden_line_magnitude(self):
        alpha = (xr.sqrt(5) - 1) / 2
        seq = nh.NilPolySeq(nh.heis_identity(), nh.HeisElement.of(alpha, 0, 0),
                            nh.heis_identity())
        pts = nh.orbit_points_float(nh.poly_orbit(seq, 10_000))
        stats = nh.orbit_equidistribution(pts, [(1, 0, 0)], box_level=2)
        assert stats.frequency_magnitudes[(1, 0, 0)] <= 0.01

    def test_constant_orbit(self):
        pts = np.tile([0.3, 0.4, 0.5], (50, 1))
        stats = nh.orbit_equidistribution(pts, [(1, 0, 0), (2, 1, 0), (0, 0, 0)])
        assert stats.frequency_magnitudes[(1, 0, 0)] == pytest.approx(1.0)
        assert stats.frequency_magnitudes[(2, 1, 0)] == pytest.approx(1.0)
        assert stats.frequency_magnitudes[(0, 0, 0)] == pytest.approx(1.0)

    def test_frequency_validation(self):
        pts = np.tile([0.3, 0.4, 0.5], (5, 1))
        with pytest.raises(DomainError):
            nh.orbit_equidistribution(pts, [(1, 0, 1)])

    def test_box_discrepancy_uniformish(self):
        rng = np.random.default_rng(4)
        pts = rng.random((20_000, 3))
        stats = nh.orbit_equidistribution(pts, [], box_level=2)
        assert stats.box_discrepancy <= 0.02


class TestSuspension:
    def test_integer_polynomial(self):
        sys_ = nh.SuspensionSystem.of("(sqrt(5)-1)/2", [0, 1])  # p(n) = n
        alpha = (math.sqrt(5) - 1) / 2
        for n in range(50):
            v = nh.suspension_eval(sys_, n).midpoint_float()
            assert abs(v - (n * alpha) % 1.0) < 1e-12

    def test_square_at_two(self):
        sys_ = nh.SuspensionSystem.of("sqrt(2)", [0, 0, 1])  # p(n) = n^2
        v = nh.suspension_eval(sys_, 2).midpoint_float()
        assert v == pytest.approx((4 * math.sqrt(2)) % 1.0, abs=1e-12)
        assert v == pytest.approx(0.656854, abs=1e-6)

    def test_half_shift_cancels(self):
        sys_ = nh.SuspensionSystem.of("sqrt(2)-1", [Fraction(1, 2), 1])  # n + 1/2
        alpha = math.sqrt(2) - 1
        for n in range(30):
            v = nh.suspension_eval(sys_, n).midpoint_float()
            assert abs(v - (n * alpha) % 1.0) < 1e-12

    def test_identity_with_floor_composition(self):
        cases = [
            ("sqrt(2)", [0, 0, 1]),
            ("(sqrt(5)-1)/2", [Fraction(1, 3), Fraction(1, 2), Fraction(1, 5)]),
            ("sqrt(3)-1", [0, Fraction(7, 3)]),
        ]
        for alpha, poly in cases:
            sys_ = nh.SuspensionSystem.of(alpha, poly)
            for n in range(120):
                v = nh.suspension_eval(sys_, n)
                d = nh.suspension_direct(sys_, n)
                diff = v - d
                assert diff.lower <= 0 <= diff.upper or \
                    abs(diff.midpoint_float()) < 2.0**-64
