"""Mobius sieve correctness and the correlation machinery."""

import math
import random
import warnings
from fractions import Fraction

import numpy as np
import pytest

from bracketlab import mobius as mb
from bracketlab.errors import DomainError, LimitExceeded, RegimeWarning


@pytest.fixture(scope="module")
def table():
    return mb.mobius_sieve(2_000_000)


class TestSieve:
    def test_first_values(self, table):
        want = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
        assert [table[n] for n in range(1, 13)] == want

    def test_examples(self, table):
        assert table[12] == 0
        assert table[30] == -1
        assert mb.mertens(table, 100) == 1

    def test_exact_vs_trial_division_small(self, table):
        for n in range(1, 100_001):
            assert table.values[n] == mb.mu_trial_division(n)

    def test_exact_vs_trial_division_random_large(self):
        rng = random.Random(31337)
        ns = sorted(rng.randrange(1, 10**8) for _ in range(300))
        primes = None
        for n in ns:
            mu = mb.mobius_range(n, n + 1)
            assert int(mu[0]) == mb.mu_trial_division(n), n

    def test_block_boundaries(self):
        tab = mb.mobius_sieve(3_000_000)
        block = 1 << 20
        for n in (block - 1, block, block + 1, 2 * block, 2 * block + 1):
            assert tab[n] == mb.mu_trial_division(n)

    def test_limit_cap(self):
        with pytest.raises(LimitExceeded):
            mb.mobius_sieve(10**8 + 1)

    def test_mertens_oracle(self, table):
        # independent accumulation by trial division
        assert mb.mertens(table, 100) == sum(mb.mu_trial_division(n)
                                             for n in range(1, 101))

    def test_squarefree_density(self, table):
        sf = mb.squarefree_count(table, 10**6)
        assert abs(sf / 10**6 - 6 / math.pi**2) < 0.001


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        tab = mb.mobius_sieve(12_345)
        path = tmp_path / "mu.bin"
        mb.save_table(tab, str(path))
        raw = path.read_bytes()
        assert raw[:4] == b"MU01"
        assert int.from_bytes(raw[4:12], "little") == 12_345
        back = mb.load_table(str(path))
        assert back.limit == tab.limit
        assert np.array_equal(back.values, tab.values)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"XXXX" + b"\x00" * 16)
        with pytest.raises(DomainError):
            mb.load_table(str(path))


class TestCorrelation:
    def test_constant_one(self, table):
        s = np.ones(10**6, dtype=np.int64)
        rep = mb.correlation(s, [100, 1000], table)
        assert rep.checkpoints[0] == (100, Fraction(1, 100), 0.01)
        assert rep.checkpoints[1][1] == Fraction(mb.mertens(table, 1000), 1000)

    def test_constant_zero(self, table):
        s = np.zeros(1000, dtype=np.int64)
        rep = mb.correlation(s, [10, 100, 1000], table)
        assert all(fr == 0 for _, fr, _ in rep.checkpoints)

    def test_self_correlation_squarefree_density(self, table):
        n = np.arange(1, 10**6 + 1)
        s = table.values[1:10**6 + 1].astype(np.int64)
        rep = mb.correlation(s, [10**6], table)
        # mu(n)^2 summed = squarefree count
        assert rep.checkpoints[0][1] == Fraction(mb.squarefree_count(table, 10**6), 10**6)
        assert abs(rep.checkpoints[0][2] - 6 / math.pi**2) < 0.001

    def test_average_bounded_by_sup(self, table):
        rng = np.random.default_rng(8)
        s = rng.integers(-3, 4, size=5000)
        rep = mb.correlation(s, [10, 500, 5000], table)
        for _, fr, _ in rep.checkpoints:
            assert abs(fr) <= 3

    def test_dyadic_blocks(self, table):
        s = np.ones(2**12, dtype=np.int64)
        blocks = mb.dyadic_averages(s, table, 2**12)
        assert [N for N, _ in blocks] == [2**j for j in range(12)]
        for N, avg in blocks:
            want = (mb.mertens(table, 2 * N - 1) - mb.mertens(table, N - 1)) / N
            assert avg == pytest.approx(want)

    def test_checkpoint_bounds(self, table):
        with pytest.raises(DomainError):
            mb.correlation(np.ones(10), [10**9], table)


class TestShortIntervalSup:
    def test_zero_word(self, table):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            assert mb.short_interval_sup(np.zeros(100), 10**5, 100, 10, table) == 0.0

    def test_single_term(self, table):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            v = mb.short_interval_sup(np.array([2.0]), 999_983, 1, 5, table)
        assert v == abs(table[999_983] * 2.0)

    def test_matches_quadratic_oracle(self, table):
        rng = np.random.default_rng(12)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            for _ in range(50):
                N = int(rng.integers(10**4, 10**6))
                H = int(rng.integers(2, 1000))
                s = rng.integers(0, 2, size=H).astype(np.float64)
                fast = mb.short_interval_sup(s, N, H, 1, table)
                brute = mb.short_interval_sup_brute(s, N, H, table)
                assert fast == pytest.approx(brute, abs=1e-12)

    def test_regime_warning(self, table):
        with pytest.warns(RegimeWarning):
            mb.short_interval_sup(np.ones(10), 10**6, 10, 2, table)

    def test_regime_silent_inside(self, table):
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            mb.short_interval_sup(np.ones(40_000), 10**6, 40_000, 3, table)

    def test_larger_q_never_smaller(self, table):
        rng = np.random.default_rng(3)
        s = rng.integers(0, 2, size=500).astype(np.float64)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            v1 = mb.short_interval_sup(s, 10**5, 500, 1, table)
            v10 = mb.short_interval_sup(s, 10**5, 500, 10, table)
        assert v10 >= v1 - 1e-15


class TestDecaySlope:
    def test_negative_for_decaying(self):
        cps = [(2**j, None, 2.0 ** (-j / 2)) for j in range(10, 20)]
        assert mb.decay_slope(cps) < 0

    def test_skips_zeros(self):
        cps = [(10, None, 0.0), (100, None, 0.1), (1000, None, 0.01)]
        assert mb.decay_slope(cps) < 0
