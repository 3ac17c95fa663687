import math

import numpy as np
import pytest

from dgnrisk.charfn import cf, cf_grad, parameter_ids, strip_of_regularity
from dgnrisk.errors import OutsideStrip, UnknownParameter
from dgnrisk.model import RemappedPortfolio


class TestCf:
    def test_normalization_at_zero(self, case1, case2, case3, gauss1):
        for p in (case1, case2, case3, gauss1):
            assert cf(p, 0.0) == 1.0 + 0.0j

    def test_single_quadratic_factor(self):
        p = RemappedPortfolio(0.0, [0.0], [1.0])
        for w in (0.3, 1.7, -2.2):
            assert cf(p, w) == pytest.approx(1.0 / np.sqrt(1.0 - 1j * w), rel=1e-14)

    def test_single_gaussian_factor(self, gauss1):
        for w in (0.5, 2.0, -1.3):
            assert cf(gauss1, w) == pytest.approx(math.exp(-w * w / 2.0), rel=1e-14)

    def test_against_mc_expectation(self, case1):
        # E[exp(i phi V)] estimated on 10^6 simulated scenarios
        phi = 0.3 + 0.1j
        rng = np.random.default_rng(101)
        y = rng.normal(size=(15, 1_000_000))
        v = case1.delta @ y + 0.5 * (case1.lambda_ @ y**2)
        z = np.exp(1j * phi * v)
        est = z.mean()
        se_re = z.real.std(ddof=1) / math.sqrt(z.size)
        se_im = z.imag.std(ddof=1) / math.sqrt(z.size)
        val = cf(case1, phi)
        assert abs(val.real - est.real) < 3.0 * se_re
        assert abs(val.imag - est.imag) < 3.0 * se_im

    def test_conjugate_symmetry(self, case1):
        rng = np.random.default_rng(3)
        for _ in range(25):
            w = rng.uniform(0.0, 5.0)
            nu = rng.uniform(-0.45, 0.45)
            a = cf(case1, -w + 1j * nu)
            b = cf(case1, w + 1j * nu)
            assert a == pytest.approx(np.conj(b), rel=1e-13, abs=1e-15)

    def test_modulus_bounded_on_real_axis(self, case1, case2):
        w = np.linspace(-20.0, 20.0, 401)
        for p in (case1, case2):
            vals = np.abs(cf(p, w))
            assert np.all(vals <= 1.0 + 1e-12)
            assert vals[200] == 1.0  # only at w = 0

    def test_vectorized_matches_scalar(self, case2):
        w = np.array([0.1, 0.5 + 0.05j, -2.0 + 0.1j])
        vec = cf(case2, w)
        for i, wi in enumerate(w):
            assert vec[i] == cf(case2, complex(wi))


class TestStrip:
    def test_negative_min(self, case1):
        nu_minus, nu_plus = strip_of_regularity(case1)
        assert nu_plus == 0.5
        assert nu_minus == -0.5

    def test_all_zero(self):
        p = RemappedPortfolio(0.0, [1.0, 1.0], [0.0, 0.0])
        assert strip_of_regularity(p) == (-math.inf, math.inf)

    def test_positive_min(self, case3):
        nu_minus, nu_plus = strip_of_regularity(case3)
        assert nu_plus == math.inf
        assert nu_minus == -0.5

    def test_cf_rejects_boundary(self, case1):
        with pytest.raises(OutsideStrip):
            cf(case1, 1.0 + 0.5j)
        with pytest.raises(OutsideStrip):
            cf(case1, 1.0 + 0.7j)
        with pytest.raises(OutsideStrip):
            cf(case1, -0.5j)
        cf(case1, 1.0 + 0.49j)  # strictly inside is fine


class TestCfGrad:
    def test_zero_frequency(self, case1):
        for beta in ("theta", "delta_0", "delta_7", "lambda_3", "lambda_14"):
            assert cf_grad(case1, 0.0, beta) == 0.0

    def test_unknown_parameter(self, case1):
        for bad in ("delta_15", "lambda_-1", "vega", "delta_x"):
            with pytest.raises(UnknownParameter):
                cf_grad(case1, 0.1, bad)

    def test_parameter_ids(self, case3):
        ids = parameter_ids(case3)
        assert len(ids) == 31
        assert ids[0] == "theta"
        assert "delta_14" in ids and "lambda_0" in ids

    def test_matches_finite_differences(self, case1):
        from conftest import shift_parameter

        phi = 0.5 + 0.2j
        h = 1e-6
        for beta in parameter_ids(case1):
            fd = (cf(shift_parameter(case1, beta, h), phi)
                  - cf(shift_parameter(case1, beta, -h), phi)) / (2.0 * h)
            an = cf_grad(case1, phi, beta)
            assert abs(fd - an) <= 1e-6 * max(abs(an), 1e-12)
