"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Heavy artifacts (the trichotomy census, the 1e7 sieve) are shared across
criteria through module-scoped fixtures.  Stated runtime budgets are
asserted where the criteria state them.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from bracketlab import equidist as eq
from bracketlab import exactreal as xr
from bracketlab import gp_core as gp
from bracketlab import hardy as hd
from bracketlab import mobius as mb
from bracketlab import nilheis as nh
from bracketlab import subword as sw
from bracketlab import taylor_error as te
from bracketlab.cli import main as cli_main


def report(number: int, name: str):
    """Decorator printing the per-criterion verdict line."""

    def wrap(fn):
        import functools

        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number} ({name}): FAIL")
                raise
            print(f"ACCEPTANCE {number} ({name}): PASS")

        return run

    return wrap


# ---------------------------------------------------------------------------
# Shared heavy artifacts


@pytest.fixture(scope="module")
def trichotomy_census():
    """Criterion 3/4 grid: consecutive run at H=64 plus sampled N at both windows."""
    f = hd.parse_hardy("t^(3/2)")
    t0 = time.monotonic()
    lo = 10**5
    consecutive = te.count_profiles(f, 2, 4, 64, (lo, lo + 9_999),
                                    check_remainder=True)
    sampled_N = sorted({int(round(10 ** (3 + 4 * i / 59))) for i in range(60)})
    sampled = {64: [], 256: []}
    for H in (64, 256):
        for N in sampled_N:
            census = te.count_profiles(f, 2, 4, H, (N, N), check_remainder=True)
            sampled[H].append((N, census.per_window[H]))
    elapsed = time.monotonic() - t0
    return {"f": f, "consecutive": consecutive, "sampled": sampled,
            "sampled_N": sampled_N, "elapsed": elapsed}


@pytest.fixture(scope="module")
def sieve_10m():
    return mb.mobius_sieve(10**7)


# ---------------------------------------------------------------------------
# Criteria


@report(1, "sturmian exactness")
def test_criterion_1_sturmian_exactness():
    start = time.monotonic()
    for alpha in ("sqrt(2)-1", "sqrt(3)-1", "(sqrt(5)-1)/2"):
        expr = gp.sturmian_expr(alpha, 0)
        word = gp.generate_word(expr, None, gp.IndexRange(), 10**6)
        curve = sw.complexity_curve(word, 200)
        assert np.array_equal(curve.counts, curve.H_values + 1), alpha
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"


@report(2, "subexponential complexity shape")
def test_criterion_2_complexity_shape():
    expr = gp.sturmian_expr("sqrt(2)-1", 0)
    index = hd.FloorIndex(hd.parse_hardy("t^(3/2)"))
    word = gp.generate_word(expr, None, index, 10**7)
    curve = sw.complexity_curve(word, 24)
    sel = slice(3, 24)  # H in [4, 24]
    fit = sw.fit_growth(sw.ComplexityCurve(curve.H_values[sel], curve.counts[sel],
                                           curve.prefix_length, curve.origin))
    assert fit.model in ("polynomial", "stretched")
    if fit.model == "stretched":
        assert fit.exponent <= 0.95
    assert math.log(curve.counts[23]) <= 5 * 24**0.95


@report(3, "floor-error trichotomy")
def test_criterion_3_trichotomy(trichotomy_census):
    data = trichotomy_census
    hc = data["consecutive"].per_window[64]
    # 100% classified, no overflow
    assert hc.tally["sparse_overflow"] == 0
    assert sum(hc.tally.values()) == 10_000
    assert hc.range_violations == 0
    # distinct profiles over 1e4 consecutive centres under exp(5 * 64^0.95)
    assert math.log(max(hc.distinct_count, 1)) <= 5 * 64**0.95
    # sampled centres across [1e3, 1e7] at both windows, also fully classified
    for H in (64, 256):
        for N, cell in data["sampled"][H]:
            assert cell.tally["sparse_overflow"] == 0, (H, N)
            assert cell.range_violations == 0, (H, N)
    assert data["elapsed"] < 600.0, f"runtime {data['elapsed']:.0f}s exceeds 10min"


@report(4, "remainder soundness and envelope")
def test_criterion_4_remainder(trichotomy_census):
    data = trichotomy_census
    # zero certified remainder violations across the whole criterion-3 grid
    assert data["consecutive"].per_window[64].remainder_violations == 0
    for H in (64, 256):
        for N, cell in data["sampled"][H]:
            assert cell.remainder_violations == 0, (H, N)
    # one fitted constant dominates B over the whole grid
    f = data["f"]
    grid = [(N, H) for H in (64, 256) for N in data["sampled_N"] if N >= hd.DEFAULT_T0 + H]
    c_hat = hd.envelope_constant(f, 2, 4, grid)
    assert 0 < c_hat < 10.0
    for N, H in grid:
        tm = hd.taylor_model(f, N, 4, H)
        env = hd.remainder_envelope(f, 2, 4, N, H)
        assert tm.remainder_bound_float() <= c_hat * env * (1 + 1e-12)


@report(5, "exact discrepancy")
def test_criterion_5_discrepancy():
    rng = random.Random(20250810)
    for _ in range(100):
        n = rng.randrange(1, 201)
        pts = [Fraction(rng.randrange(0, 4096), 4096) for _ in range(n)]
        assert eq.discrepancy(pts).value == eq.discrepancy_brute_force(pts)
    assert eq.discrepancy([Fraction(0), Fraction(1, 2)]).value == Fraction(1, 2)
    for N in (10, 64, 200):
        grid = [Fraction(i, N) for i in range(N)]
        assert eq.discrepancy(grid).value == Fraction(1, N)
    alpha_f = (math.sqrt(5) - 1) / 2
    alpha = (xr.sqrt(5) - 1) / 2
    for N in (100, 1000, 10_000, 100_000):
        n = np.arange(N, dtype=np.int64)
        pts = n * alpha_f - xr.floor_affine_array(alpha, 0, n)
        assert eq.discrepancy(list(pts)).value <= 3 * math.log(N) / N


@report(6, "structure dichotomy")
def test_criterion_6_weyl():
    cases = [
        # (coefficients, denominator lcm of the non-constant part, delta)
        ([0, Fraction(1, 2)], 2, 0.1),
        ([Fraction(1, 3), Fraction(3, 4)], 4, 0.1),
        ([0, Fraction(1, 2), Fraction(2, 3)], 6, 0.1),
        ([Fraction(1, 7), Fraction(5, 6), 0, Fraction(3, 10)], 30, 0.02),
    ]
    for beta, lcm, delta in cases:
        rep = eq.weyl_dichotomy(beta, 100, delta)
        assert rep.branch == "structured", beta
        assert rep.ell == lcm, (beta, rep.ell)
        assert all(v == 0.0 for v in rep.defects.values())
    rep = eq.weyl_dichotomy([0, "(sqrt(5)-1)/2"], 10_000, 0.05)
    assert rep.branch == "equidistributed"


@report(7, "sublevel linear law")
def test_criterion_7_sublevel():
    P = eq.BoxPolynomial.from_table({(1, 1): 1})
    rep = eq.sublevel_measure(P, 0.01, "grid", budget=1 << 19)
    exact = 0.01 * (1 - math.log(0.01))
    assert abs(rep.measure - exact) <= 0.05 * exact
    rng = np.random.default_rng(777)
    ratios = []
    for _ in range(10):
        coeffs = [Fraction(float(c)).limit_denominator(2**20)
                  for c in rng.uniform(-1, 1, size=4)]
        P = eq.BoxPolynomial.from_table(coeffs)
        if P.is_zero() or P.degree < 1:
            continue
        sup = eq.estimate_sup_norm(P)
        P = P.scaled(Fraction(1 / sup).limit_denominator(10**9))
        for j in range(1, 9):
            delta = 0.5**j
            r = eq.sublevel_measure(P, delta**3, "grid", budget=1 << 16)
            ratios.append((r.measure + r.error_bar) / delta)
    c_single = max(ratios)
    assert all(r <= c_single for r in ratios)
    assert c_single <= 8.0


@report(8, "heisenberg exactness")
def test_criterion_8_heisenberg():
    rng = random.Random(808)

    def elem():
        return nh.HeisElement.of(
            Fraction(rng.randrange(-40, 40), rng.randrange(1, 10)),
            Fraction(rng.randrange(-40, 40), rng.randrange(1, 10)),
            Fraction(rng.randrange(-40, 40), rng.randrange(1, 10)),
        )

    def exact(g):
        return tuple(v.exact_value for v in (g.x1, g.x2, g.x3))

    for _ in range(10_000):
        a, b, c = elem(), elem(), elem()
        assert exact(nh.heis_mul(nh.heis_mul(a, b), c)) == exact(
            nh.heis_mul(a, nh.heis_mul(b, c)))
        assert exact(nh.heis_mul(a, nh.heis_inv(a))) == (0, 0, 0)
    for _ in range(10_000):
        g = elem()
        pt, gamma = nh.heis_reduce(g)
        vals = tuple(v.exact_value for v in pt)
        assert all(0 <= v < 1 for v in vals)
        assert exact(nh.heis_mul(g, nh.lattice_element(*gamma))) == vals
    for _ in range(100):
        g = elem()
        acc = nh.heis_identity()
        for n in range(100):
            assert exact(nh.heis_pow(g, n)) == exact(acc)
            acc = nh.heis_mul(acc, g)
    # Orbit representation: third reduced coordinate of the (a, b, 0) orbit
    # against the bracket-expression reading of the reduction, n <= 1e4
    a_text, b_text = "sqrt(2)-1", "sqrt(3)-1"
    aa, bb = xr.sqrt(2) - 1, xr.sqrt(3) - 1
    seq = nh.NilPolySeq(nh.heis_identity(),
                        nh.HeisElement(aa, bb, xr.AdaptiveReal(0)),
                        nh.heis_identity())
    expr = gp.parse_gp(
        f"frac((1/2*n^2 - 1/2*n)*({a_text})*({b_text})"
        f" - (({a_text})*n - floor(({a_text})*n))*floor(({b_text})*n))"
    )
    tol = Fraction(1, 2**64)
    for n in range(10_000):
        third = nh.heis_reduce(seq.at(n))[0][2]
        other = gp.eval_gp(expr, n)
        diff = third - other
        assert diff.lower - tol <= 0 <= diff.upper + tol, n
    # Suspension identity for three (alpha, p) pairs, n <= 1e4
    pairs = [
        ("sqrt(2)", [0, 0, 1]),
        ("(sqrt(5)-1)/2", [Fraction(1, 3), Fraction(1, 2), Fraction(1, 5)]),
        ("sqrt(3)-1", [0, Fraction(7, 3)]),
    ]
    for alpha, poly in pairs:
        system = nh.SuspensionSystem.of(alpha, poly)
        for n in range(10_000):
            diff = nh.suspension_eval(system, n) - nh.suspension_direct(system, n)
            assert diff.lower - tol <= 0 <= diff.upper + tol, (alpha, n)


@report(9, "mobius correlations")
def test_criterion_9_mobius(sieve_10m):
    start = time.monotonic()
    table = sieve_10m
    for n in range(1, 100_001):
        assert int(table.values[n]) == mb.mu_trial_division(n)
    assert sum(mb.mu_trial_division(n) for n in range(1, 101)) == 1
    assert mb.mertens(table, 100) == 1
    assert abs(mb.squarefree_count(table, 10**6) / 10**6 - 6 / math.pi**2) < 0.001
    checkpoints = [2**j for j in range(14, 24)]
    n = np.arange(1, checkpoints[-1] + 1, dtype=np.int64)
    alpha = xr.sqrt(2) - 1
    along_n = (xr.floor_affine_array(alpha, 0, n + 1)
               - xr.floor_affine_array(alpha, 0, n)).astype(np.int64)
    m = xr.floor_power_array(n, Fraction(3, 2))
    along_f = (xr.floor_affine_array(alpha, 0, m + 1)
               - xr.floor_affine_array(alpha, 0, m)).astype(np.int64)
    rep_n = mb.correlation(along_n, checkpoints, table)
    rep_f = mb.correlation(along_f, checkpoints, table)
    assert mb.decay_slope(rep_n.checkpoints) < 0
    assert mb.decay_slope(rep_f.checkpoints) < 0
    elapsed = time.monotonic() - start
    assert elapsed < 900.0, f"runtime {elapsed:.0f}s exceeds 15min"


@report(10, "reproducibility")
def test_criterion_10_reproducibility(tmp_path, capsys):
    jobs = [
        ["sublevel", "--coeffs", "0,0;0,1", "--epsilon", "0.05",
         "--method", "montecarlo", "--budget", "50000", "--seed", "1234"],
        ["census", "--f", "t^(3/2)", "--k", "2", "--ell", "4", "--hmax", "16",
         "--nmin", "100000", "--nmax", "100050", "--seed", "7"],
        ["complexity", "--word", "sturmian sqrt(2)-1 0", "--f", "t",
         "--nmax", "20000", "--hmax", "12", "--seed", "7"],
        ["mobius", "--sieve", "50000", "--word", "sturmian sqrt(2)-1 0",
         "--f", "t", "--checkpoints", "1000,10000", "--seed", "7"],
    ]
    for i, job in enumerate(jobs):
        out = tmp_path / f"job{i}.out"
        assert cli_main(job + ["--out", str(out)]) == 0
        first = out.read_bytes()
        assert cli_main(job + ["--out", str(out)]) == 0
        assert out.read_bytes() == first, job[0]
    capsys.readouterr()
