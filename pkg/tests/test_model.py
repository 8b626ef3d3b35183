import math

import numpy as np
import pytest

from memfhn.grid import Grid2D
from memfhn.model import (
    NetworkParams,
    NonlinearityBounds,
    f_derivative,
    f_eval,
    init_random,
    validate_params,
    verify_assumption,
)
from tests.helpers import params_with


class TestCubic:
    def test_roots(self):
        bounds = NonlinearityBounds.prototype(0.7)
        assert f_eval(0.0, bounds) == 0.0
        assert f_eval(1.0, bounds) == 0.0
        assert f_eval(0.7, bounds) == 0.0

    def test_cubic_goes_to_minus_infinity(self):
        bounds = NonlinearityBounds.prototype(1.0)
        assert f_eval(1e3, bounds) < -1e8

    def test_prototype_bounds_kappa_1(self):
        # the published choice: lam = 0.25, phi_bar = 4, beta = 4/3
        bounds = NonlinearityBounds.prototype(1.0)
        assert bounds.lam == 0.25
        assert bounds.phi_bar == 4.0
        assert bounds.beta == pytest.approx(4.0 / 3.0, rel=0, abs=0)

    def test_vectorized(self):
        bounds = NonlinearityBounds.prototype(1.0)
        s = np.linspace(-2, 2, 7)
        out = f_eval(s, bounds)
        assert out.shape == s.shape
        assert out[3] == f_eval(float(s[3]), bounds)

    def test_derivative_matches_difference_quotient(self):
        bounds = NonlinearityBounds.prototype(0.4)
        h = 1e-6
        for s in (-1.3, 0.0, 0.47, 2.2):
            fd = (f_eval(s + h, bounds) - f_eval(s - h, bounds)) / (2 * h)
            assert f_derivative(s, bounds) == pytest.approx(fd, abs=1e-8)


class TestVerifyAssumption:
    def test_prototype_clean_on_standard_range(self):
        report = verify_assumption(NonlinearityBounds.prototype(1.0), (-10, 10), 10_000)
        assert report.passed
        assert report.n_violations == 0

    def test_prototype_clean_on_wide_range(self):
        report = verify_assumption(NonlinearityBounds.prototype(1.0), (-100, 100), 100_000)
        assert report.passed

    def test_halved_beta_violates_near_argmax(self):
        # max f' = (1+kappa)^2/3 - kappa exceeds beta/2 = (1+kappa)^2/6
        # exactly when kappa < 2 - sqrt(3) or kappa > 2 + sqrt(3)
        kappa = 0.1
        proto = NonlinearityBounds.prototype(kappa)
        weakened = NonlinearityBounds(kappa=kappa, lam=proto.lam,
                                      beta=proto.beta / 2, phi_bar=proto.phi_bar)
        report = verify_assumption(weakened, (-10, 10), 10_000)
        assert not report.passed
        assert [v for v in report.violations if v[1] == "derivative"]
        # the largest excess sits at the analytic maximizer of f'
        argmax = (1 + kappa) / 3
        assert report.worst_violation[1] == "derivative"
        assert report.worst_violation[0] == pytest.approx(argmax, abs=1e-12)

    def test_halved_beta_is_harmless_for_kappa_1(self):
        # for kappa = 1 the derivative peak is 1/3 < beta/2 = 2/3, so no
        # violation appears; the weakened-bound scenario needs small kappa
        proto = NonlinearityBounds.prototype(1.0)
        weakened = NonlinearityBounds(kappa=1.0, lam=proto.lam,
                                      beta=proto.beta / 2, phi_bar=proto.phi_bar)
        assert verify_assumption(weakened, (-10, 10), 10_000).passed

    def test_zero_lam_weakens_first_inequality(self):
        proto = NonlinearityBounds.prototype(1.0)
        loose = NonlinearityBounds(kappa=1.0, lam=0.0, beta=proto.beta,
                                   phi_bar=proto.phi_bar)
        report = verify_assumption(loose, (-10, 10), 10_000)
        assert not [v for v in report.violations if v[1] == "quartic"]

    def test_requires_enough_samples(self):
        with pytest.raises(ValueError):
            verify_assumption(NonlinearityBounds.prototype(1.0), (-10, 10), 99)

    def test_rejects_empty_range(self):
        with pytest.raises(ValueError):
            verify_assumption(NonlinearityBounds.prototype(1.0), (5, 5), 1000)


class TestInitRandom:
    def test_deterministic(self):
        grid = Grid2D(8, 8, 1.0)
        p = params_with()
        a = init_random(grid, p, 0.05, seed=123)
        b = init_random(grid, p, 0.05, seed=123)
        assert np.array_equal(a.u, b.u)
        assert np.array_equal(a.w, b.w)
        assert np.array_equal(a.rho, b.rho)
        assert a.t == 0.0

    def test_seed_changes_data(self):
        grid = Grid2D(8, 8, 1.0)
        p = params_with()
        a = init_random(grid, p, 0.05, seed=1)
        b = init_random(grid, p, 0.05, seed=2)
        assert not np.array_equal(a.u, b.u)

    def test_range_and_shape(self):
        grid = Grid2D(16, 12, 0.5)
        p = params_with(m=3)
        st = init_random(grid, p, 0.05, seed=0)
        assert st.u.shape == (3, 16, 12)
        for stack in (st.u, st.w, st.rho):
            assert stack.min() >= 0.0
            assert stack.max() < 0.05

    def test_zero_amplitude_gives_zero_state(self):
        grid = Grid2D(8, 8, 1.0)
        st = init_random(grid, params_with(), 0.0, seed=5)
        assert not st.u.any()
        assert not st.w.any()
        assert not st.rho.any()

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            init_random(Grid2D(8, 8, 1.0), params_with(), -0.1, seed=0)


class TestParams:
    def test_full_invariants(self):
        assert validate_params(params_with()) == []
        assert validate_params(params_with(m=1))
        assert validate_params(params_with(eta=-1.0))
        assert validate_params(params_with(P=-0.5))

    def test_zero_P_is_allowed(self):
        assert validate_params(params_with(P=0.0)) == []

    def test_nonfinite_rejected_at_construction(self):
        with pytest.raises(ValueError):
            params_with(eta=math.nan)

    def test_degenerate_corners_constructible(self):
        # formula-level checks need sigma = 0 etc.
        params_with(sigma=0.0, k=0.0, c=0.0)

    def test_bounds_require_positive_kappa(self):
        with pytest.raises(ValueError):
            NonlinearityBounds(kappa=0.0, lam=0.25, beta=1.0, phi_bar=1.0)
