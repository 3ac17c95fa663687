import math

import numpy as np
import pytest

from dgnrisk.errors import NonFiniteIntegrand
from dgnrisk.quadrature import QuadConfig, QuadResult, fourier_cos, fourier_sin


def dense_oracle(g, x, trig, wmax, n=1_000_001):
    """Richardson-corrected dense trapezoid on [0, wmax]."""
    w = np.linspace(0.0, wmax, n)
    f = g(w) * trig(w * x)
    t1 = np.trapezoid(f, w)
    t2 = np.trapezoid(f[::2], w[::2])
    return (4.0 * t1 - t2) / 3.0


class TestClosedForms:
    def test_exp_cos_unit(self):
        r = fourier_cos(lambda w: np.exp(-w), 1.0)
        assert r.converged
        assert r.value == pytest.approx(0.5, abs=1e-12)

    def test_half_gaussian_at_zero(self):
        r = fourier_cos(lambda w: np.exp(-(w**2) / 2.0), 0.0)
        assert r.value == pytest.approx(math.sqrt(math.pi / 2.0), abs=1e-12)

    def test_exp_cos_three(self):
        r = fourier_cos(lambda w: np.exp(-w), 3.0)
        assert r.value == pytest.approx(0.1, abs=1e-12)

    def test_exp_sin_unit(self):
        r = fourier_sin(lambda w: np.exp(-w), 1.0)
        assert r.value == pytest.approx(0.5, abs=1e-12)

    def test_sin_at_zero_is_exact_zero(self):
        r = fourier_sin(lambda w: 1.0 / (1.0 + w**4), 0.0)
        assert r == QuadResult(0.0, 0.0, 0, True)

    def test_rational_family(self):
        # integral exp(-w) trig(wx): cos -> 1/(1+x^2), sin -> x/(1+x^2)
        for x in (0.25, 2.0, 7.5, 33.0):
            rc = fourier_cos(lambda w: np.exp(-w), x)
            rs = fourier_sin(lambda w: np.exp(-w), x)
            assert rc.value == pytest.approx(1.0 / (1.0 + x * x), abs=1e-12)
            assert rs.value == pytest.approx(x / (1.0 + x * x), abs=1e-12)


class TestAgainstDenseOracle:
    def test_gaussian_ramp_sin(self):
        g = lambda w: w * np.exp(-(w**2) / 2.0)
        r = fourier_sin(g, 2.0)
        want = dense_oracle(g, 2.0, np.sin, 40.0)
        assert abs(r.value - want) < 1e-9

    def test_damped_suite(self):
        rng = np.random.default_rng(99)
        hon_fail = 0
        cases = 0
        for _ in range(12):
            a = 10 ** rng.uniform(-2, 0)
            b = 10 ** rng.uniform(-1, 0.3)
            cc = rng.uniform(0.0, 4.0)
            x = rng.uniform(0.0, 50.0)
            g = lambda w, a=a, b=b, cc=cc: np.exp(-a * w**2 - b * w) * (1 + cc * w**2) ** -0.25
            scale = min(1.0 / b, 1.0 / math.sqrt(a))
            wmax = min(44.0 / b, math.sqrt(44.0 / a)) + 5.0
            for trig, quad in ((np.cos, fourier_cos), (np.sin, fourier_sin)):
                r = quad(g, x, decay_scale=scale)
                want = dense_oracle(g, x, trig, wmax)
                err = abs(r.value - want)
                assert err <= max(1e-12, 1e-9 * abs(r.value)) * 10.0
                hon_fail += err > 10.0 * r.abs_error_estimate
                cases += 1
        assert hon_fail <= 0.05 * cases


class TestBehaviour:
    def test_linearity(self):
        g = lambda w: np.exp(-0.7 * w) / (1.0 + w**2) ** 0.25
        r1 = fourier_cos(g, 4.0)
        r5 = fourier_cos(lambda w: 5.0 * g(w), 4.0)
        assert r5.value == pytest.approx(5.0 * r1.value, abs=5.0 * r1.abs_error_estimate + 1e-13)

    def test_slow_polynomial_tail(self):
        g = lambda w: (1.0 + w**2) ** (-15.0 / 4.0)
        r = fourier_cos(g, 12.0)
        want = dense_oracle(g, 12.0, np.cos, 2000.0, 2_000_001)
        assert r.converged
        assert abs(r.value - want) < 1e-11

    def test_negative_x_rejected(self):
        with pytest.raises(ValueError):
            fourier_cos(lambda w: np.exp(-w), -1.0)

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            QuadConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadConfig(max_cycles=0)

    def test_non_finite_integrand(self):
        with pytest.raises(NonFiniteIntegrand):
            fourier_cos(lambda w: np.where(w > 1.0, np.nan, 1.0) * np.exp(-w), 5.0)

    def test_max_cycles_returns_best_effort(self):
        cfg = QuadConfig(abs_tol=1e-16, rel_tol=1e-16, max_cycles=4)
        r = fourier_cos(lambda w: 1.0 / (1.0 + w**2), 8.0, cfg)
        assert not r.converged
        assert r.abs_error_estimate > 0.0

    def test_evaluation_count_reported(self):
        r = fourier_cos(lambda w: np.exp(-w), 2.0)
        assert r.evaluations > 0 and r.evaluations % 45 == 0
