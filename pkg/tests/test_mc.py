import math

import numpy as np
import pytest
import scipy.stats

from dgnrisk.errors import InsufficientTailSample, IntervalNotFound, LevelOutOfRange
from dgnrisk.fourier import choose_nu, var_for_level
from dgnrisk.mc import (
    McEstimate,
    ScenarioSample,
    _binomial_cdf_grid,
    _ci_pair,
    es_ci,
    fd_sensitivity,
    historical_es,
    historical_var,
    simulate,
    var_ci,
)
from dgnrisk.model import RemappedPortfolio, moments

HAND = ScenarioSample(np.sort(np.array([-10, -5, -1, 0, 2, 3, 4, 5, 6, 8], float)), 0, 10)


class TestSimulate:
    def test_constant_portfolio(self):
        p = RemappedPortfolio(7.0, [0.0, 0.0], [0.0, 0.0])
        s = simulate(p, 1000, seed=1)
        assert np.all(s.values == 7.0)

    def test_case3_respects_support_bound(self, case3):
        for seed in (0, 1, 2):
            s = simulate(case3, 200_000, seed=seed)
            assert s.values[0] >= -4.75

    def test_mean_within_mc_error(self, case1):
        m = moments(case1)
        s = simulate(case1, 1_000_000, seed=4)
        assert abs(s.values.mean() - m.mu1) < 4.0 * math.sqrt(m.mu2 / 1e6)

    def test_bit_identical_reproduction(self, case1):
        a = simulate(case1, 300_000, seed=99)
        b = simulate(case1, 300_000, seed=99)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.frozen_factors, b.frozen_factors)

    def test_chunk_boundaries_invisible(self, case1):
        # a sample crossing the chunk boundary extends a shorter one exactly
        short = simulate(case1, 1000, seed=5)
        long = simulate(case1, (1 << 18) + 1000, seed=5)
        assert np.array_equal(short.frozen_factors, long.frozen_factors[:, :1000])

    def test_sorted_mean_matches_raw_mean(self, case2):
        s = simulate(case2, 100_000, seed=6)
        a, b = float(s.values.mean()), float(s.raw_values.mean())
        assert math.isclose(a, b, rel_tol=1e-12)


class TestHistoricalEstimators:
    def test_hand_sample_var_integer(self):
        assert historical_var(HAND, 0.2) == 5.0

    def test_hand_sample_var_fractional(self):
        assert historical_var(HAND, 0.25) == 3.0

    def test_hand_sample_es(self):
        assert historical_es(HAND, 0.2) == 7.5

    def test_single_point_tail(self):
        level = 1.0 / HAND.t_mc
        assert historical_es(HAND, level) == historical_var(HAND, level) == 10.0

    def test_order_statistic_identity(self, case2):
        s = simulate(case2, 50, seed=8)
        for k in range(1, 50):
            assert historical_var(s, k / 50.0) == -s.values[k - 1]

    def test_level_and_tail_guards(self):
        with pytest.raises(LevelOutOfRange):
            historical_var(HAND, 0.0)
        with pytest.raises(InsufficientTailSample):
            historical_var(HAND, 0.05)  # t* = 0.5 < 1


class TestConfidenceIntervals:
    def test_exact_binomial_coverage_small_sample(self):
        rng = np.random.default_rng(10)
        s = ScenarioSample(np.sort(rng.normal(size=100)), 0, 100)
        tm, tp = _ci_pair(s, 0.5, 0.95)
        assert tm < 50 < tp
        cov = float(scipy.stats.binom.cdf(tp - 1, 100, 0.5)
                    - scipy.stats.binom.cdf(tm - 1, 100, 0.5))
        assert cov >= 0.95
        # minimality: shrinking either side drops the coverage
        assert scipy.stats.binom.cdf(tp - 2, 100, 0.5) - scipy.stats.binom.cdf(tm - 1, 100, 0.5) < 0.95
        assert scipy.stats.binom.cdf(tp - 1, 100, 0.5) - scipy.stats.binom.cdf(tm, 100, 0.5) < 0.95

    def test_normal_approximation_matches_exact(self):
        # crossover regime: T p > 50 uses the corrected normal CDF
        t_mc, level = 20_000, 0.01
        grid = _binomial_cdf_grid(t_mc, level, 400)
        exact = scipy.stats.binom.cdf(np.arange(401), t_mc, level)
        assert np.abs(grid - exact).max() < 2e-3

    def test_offsets_bracket_point(self, case1):
        s = simulate(case1, 100_000, seed=12)
        for level in (0.01, 0.05):
            v = var_ci(s, level, 0.98)
            e = es_ci(s, level, 0.98)
            assert v.lower_offset >= 0.0 and v.upper_offset >= 0.0
            assert e.lower_offset >= 0.0 and e.upper_offset >= 0.0
            assert v.contains(v.point) and e.contains(e.point)

    def test_var_ci_brackets_fourier_value(self, case1):
        s = simulate(case1, 1_000_000, seed=42)
        c = choose_nu(case1)
        true_var = var_for_level(case1, 0.01, c).var
        assert var_ci(s, 0.01, 0.98).contains(true_var)

    def test_tiny_cl_hugs_the_quantile(self):
        rng = np.random.default_rng(14)
        s = ScenarioSample(np.sort(rng.normal(size=1000)), 0, 1000)
        tm, tp = _ci_pair(s, 0.105, 1e-9)
        assert tp == tm + 1
        assert tm in (104, 105, 106)

    def test_unreachable_cl(self):
        s = ScenarioSample(np.sort(np.arange(20.0)), 0, 20)
        with pytest.raises(IntervalNotFound):
            var_ci(s, 0.1, 1.0 - 1e-12)

    def test_es_ci_hand_consistency(self):
        est = es_ci(HAND, 0.3, 0.6)
        assert est.point == historical_es(HAND, 0.3)
        assert est.lower_offset >= 0.0 and est.upper_offset >= 0.0


class TestFdSensitivity:
    def test_theta_exact_translation(self, case1):
        est = fd_sensitivity(case1, "theta", None, 0.01, 1000, 3, 0.98)
        assert est == McEstimate(-1.0, 0.0, 0.0, 0.98)

    def test_zero_shock_identity(self, case1):
        est = fd_sensitivity(case1, "delta_3", 0.0, 0.05, 20_000, 3, 0.98)
        assert est.point == 0.0

    def test_matches_translation_through_full_path(self, case2):
        # shocking delta on a pure-linear factor equals an analytic shift
        p = RemappedPortfolio(0.0, [1.0], [0.0])
        est = fd_sensitivity(p, "delta_0", 0.01, 0.05, 200_000, 17, 0.98)
        # d var / d delta = z quantile for a one-factor Gaussian
        z = -math.sqrt(2.0) * scipy.special.erfinv(2 * 0.05 - 1)
        assert est.contains(z)

    def test_error_scales_inversely_with_shock(self, case1):
        wide = fd_sensitivity(case1, "lambda_0", 0.02, 0.01, 200_000, 21, 0.98)
        narrow = fd_sensitivity(case1, "lambda_0", 0.01, 0.01, 200_000, 21, 0.98)
        ratio = (narrow.lower_offset + narrow.upper_offset) / (
            wide.lower_offset + wide.upper_offset
        )
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_shared_sample_reuse(self, case1):
        s = simulate(case1, 50_000, seed=31)
        a = fd_sensitivity(case1, "delta_0", 0.01, 0.05, 50_000, 31, 0.98)
        b = fd_sensitivity(case1, "delta_0", 0.01, 0.05, 50_000, 31, 0.98, sample=s)
        assert a == b
