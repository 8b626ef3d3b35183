import numpy as np
import pytest

from memfhn.grid import Grid2D
from memfhn.metrics import pairwise_differences
from memfhn.model import NetworkState, NonlinearityBounds, init_random
from memfhn.simulate import RunConfig, SimulationDiverged, integrate, rhs, step_euler, step_rk4
from memfhn.verification import (
    reduce_to_ode_check,
    rhs_coupling_oracle,
    temporal_order_errors,
)
from tests.helpers import params_with


def constant_state(grid, m, u=0.0, w=0.0, rho=0.0):
    shape = (m, grid.nx, grid.ny)
    return NetworkState(grid, np.full(shape, float(u)), np.full(shape, float(w)),
                        np.full(shape, float(rho)))


def small_cfg(**overrides):
    defaults = dict(
        params=params_with(),
        bounds=NonlinearityBounds.prototype(1.0),
        grid=Grid2D(8, 8, 1.0),
        dt=0.00025,
        n_steps=10,
        seed=3,
        amplitude=0.05,
        record_every=1,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


class TestRhs:
    def test_hand_evaluated_point(self):
        # two identical neurons make the coupling vanish, so each behaves as
        # a single cell: u=1, w=0, rho=0 gives du = f(1) + J = 0.5
        grid = Grid2D(8, 8, 1.0)
        params = params_with(m=2)
        bounds = NonlinearityBounds.prototype(1.0)
        state = constant_state(grid, 2, u=1.0)
        du, dw, drho = rhs(state, params, bounds)
        assert np.all(du == 0.5)
        assert np.all(dw == params.a + params.c)
        assert np.all(drho == params.q)

    def test_identical_neurons_have_exactly_zero_coupling(self):
        grid = Grid2D(8, 8, 1.0)
        bounds = NonlinearityBounds.prototype(1.0)
        base = init_random(grid, params_with(m=4), 0.05, seed=9)
        same = NetworkState(grid, np.broadcast_to(base.u[0], base.u.shape).copy(),
                            np.broadcast_to(base.w[0], base.w.shape).copy(),
                            np.broadcast_to(base.rho[0], base.rho.shape).copy())
        coupled = rhs(same, params_with(m=4, P=1.45), bounds)
        uncoupled = rhs(same, params_with(m=4, P=0.0), bounds)
        for a, b in zip(coupled, uncoupled):
            assert np.array_equal(a, b)

    @pytest.mark.parametrize("m", [2, 3, 4, 8])
    def test_matches_brute_force_coupling_oracle(self, m):
        grid = Grid2D(8, 8, 1.0)
        params = params_with(m=m)
        bounds = NonlinearityBounds.prototype(1.0)
        rng = np.random.default_rng(40 + m)
        for _ in range(20):
            state = NetworkState(grid, rng.random((m, 8, 8)), rng.random((m, 8, 8)),
                                 rng.random((m, 8, 8)))
            got = rhs(state, params, bounds)
            want = rhs_coupling_oracle(state, params, bounds)
            for g, o in zip(got, want):
                assert np.abs(g - o).max() <= 1e-12

    def test_nonfinite_input_names_location(self):
        grid = Grid2D(8, 8, 1.0)
        state = constant_state(grid, 2, u=0.0)
        state.u[1, 3, 5] = np.nan
        with pytest.raises(SimulationDiverged, match=r"neuron 1.*\(3, 5\)"):
            rhs(state, params_with(m=2), NonlinearityBounds.prototype(1.0))


class TestSteppers:
    def test_zero_state_is_fixed_point_without_sources(self):
        cfg = small_cfg(params=params_with(J=0.0, c=0.0), amplitude=0.0)
        state = cfg.initial_state()
        for step in (step_euler, step_rk4):
            out = step(state, cfg)
            assert not out.u.any() and not out.w.any() and not out.rho.any()

    def test_euler_is_state_plus_dt_rhs(self):
        cfg = small_cfg()
        state = cfg.initial_state()
        du, dw, drho = rhs(state, cfg.params, cfg.bounds)
        out = step_euler(state, cfg)
        assert np.array_equal(out.u, state.u + cfg.dt * du)
        assert np.array_equal(out.w, state.w + cfg.dt * dw)
        assert np.array_equal(out.rho, state.rho + cfg.dt * drho)
        assert out.t == state.t + cfg.dt

    def test_swapped_neurons_swap_trajectories_bit_exactly(self):
        cfg = small_cfg(params=params_with(m=2), n_steps=100)
        forward = cfg.initial_state()
        swapped = NetworkState(cfg.grid, forward.u[::-1].copy(), forward.w[::-1].copy(),
                               forward.rho[::-1].copy())
        end_f, _ = integrate(cfg, initial_state=forward)
        end_s, _ = integrate(cfg, initial_state=swapped)
        assert np.array_equal(end_f.u, end_s.u[::-1])
        assert np.array_equal(end_f.w, end_s.w[::-1])
        assert np.array_equal(end_f.rho, end_s.rho[::-1])

    def test_rk4_linear_recovery_equation_fifth_order_local_error(self):
        # u pinned at 0 (J=0, amplitude=0) leaves w' = c - b w with the
        # exact solution w(t) = (w0 - c/b) exp(-b t) + c/b
        params = params_with(J=0.0, eta=1.0)
        bounds = NonlinearityBounds.prototype(1.0)
        grid = Grid2D(4, 4, 1.0)
        w0, wstar = 0.2, params.c / params.b

        def one_step_error(dt):
            cfg = RunConfig(params=params, bounds=bounds, grid=grid, dt=dt,
                            n_steps=1, amplitude=0.0)
            state = constant_state(grid, params.m, u=0.0, w=w0)
            out = step_rk4(state, cfg)
            exact = (w0 - wstar) * np.exp(-params.b * dt) + wstar
            return abs(float(out.w[0, 0, 0]) - exact)

        e_coarse, e_fine = one_step_error(0.2), one_step_error(0.1)
        assert e_coarse < 1e-6
        assert e_coarse / e_fine == pytest.approx(32.0, rel=0.3)

    def test_euler_and_rk4_error_ratios_under_halving(self):
        cfg = small_cfg()
        euler_errs, _ = temporal_order_errors(cfg, dts=(2.5e-3, 1.25e-3), method="euler")
        assert euler_errs[0] / euler_errs[1] == pytest.approx(2.0, rel=0.15)
        rk4_errs, _ = temporal_order_errors(cfg, dts=(5e-3, 2.5e-3), method="rk4")
        assert rk4_errs[0] / rk4_errs[1] == pytest.approx(16.0, rel=0.35)


class TestIntegrate:
    def test_single_step_single_row(self):
        cfg = small_cfg(n_steps=1, record_every=1)
        final, series = integrate(cfg)
        assert len(series.times) == 1
        assert series.times[0] == pytest.approx(cfg.dt)
        assert final.t == pytest.approx(cfg.dt)

    def test_deterministic_reruns(self):
        cfg = small_cfg(n_steps=50)
        _, s1 = integrate(cfg)
        _, s2 = integrate(cfg)
        assert np.array_equal(s1.times, s2.times)
        assert np.array_equal(s1.u_norm, s2.u_norm)
        assert np.array_equal(s1.g_norm_sq, s2.g_norm_sq)
        assert np.array_equal(s1.pair_d, s2.pair_d)

    def test_spatially_constant_data_stays_constant(self):
        cfg = small_cfg(n_steps=100)
        state = constant_state(cfg.grid, cfg.params.m, u=0.02, w=0.01, rho=0.03)
        final, _ = integrate(cfg, initial_state=state)
        for stack in (final.u, final.w, final.rho):
            flat = stack.reshape(cfg.params.m, -1)
            assert (flat.max(axis=1) - flat.min(axis=1)).max() <= 1e-12

    def test_identical_neurons_stay_identical(self):
        cfg = small_cfg(n_steps=200)
        base = cfg.initial_state()
        same = NetworkState(cfg.grid, np.broadcast_to(base.u[0], base.u.shape).copy(),
                            np.broadcast_to(base.w[0], base.w.shape).copy(),
                            np.broadcast_to(base.rho[0], base.rho.shape).copy())
        final, _ = integrate(cfg, initial_state=same)
        assert pairwise_differences(final).max() <= 1e-12

    def test_metrics_sink_receives_rows(self):
        cfg = small_cfg(n_steps=10, record_every=2)
        seen = []
        integrate(cfg, on_metrics=lambda row: seen.append(row["t"]))
        assert len(seen) == 5

    def test_snapshot_sink_cadence(self):
        cfg = small_cfg(n_steps=10, snapshot_every=3)
        steps = []
        integrate(cfg, on_snapshot=lambda n, state: steps.append(n))
        assert steps == [3, 6, 9]

    def test_divergence_names_step_and_flushes_partial_metrics(self):
        # huge data makes the stiff quartic reaction explode under Euler
        cfg = small_cfg(params=params_with(eta=0.01), dt=0.02, n_steps=500,
                        amplitude=1e3, record_every=1)
        with pytest.raises(SimulationDiverged, match=r"during step \d+ of 500") as exc_info:
            integrate(cfg)
        partial = exc_info.value.partial_series
        assert partial is not None
        assert len(partial.times) >= 1

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="unknown method"):
            integrate(small_cfg(), method="heun")


class TestRunConfig:
    def test_dt_above_stability_bound_rejected(self):
        with pytest.raises(ValueError, match="cfl_max_dt"):
            small_cfg(dt=0.1)

    def test_counts_validated(self):
        with pytest.raises(ValueError, match="n_steps"):
            small_cfg(n_steps=0)
        with pytest.raises(ValueError, match="record_every"):
            small_cfg(record_every=0)

    def test_params_invariants_enforced(self):
        with pytest.raises(ValueError, match="m must be >= 2"):
            small_cfg(params=params_with(m=1))


class TestOdeReduction:
    def test_euler_close_to_reference(self):
        cfg = small_cfg(grid=Grid2D(4, 4, 1.0), dt=0.002, n_steps=250,
                        record_every=250, seed=12)
        report = reduce_to_ode_check(cfg, "euler")
        assert report.spatial_variation == 0.0
        assert report.max_deviation <= 5e-3

    def test_rk4_much_closer(self):
        cfg = small_cfg(grid=Grid2D(4, 4, 1.0), dt=0.002, n_steps=250,
                        record_every=250, seed=12)
        report = reduce_to_ode_check(cfg, "rk4")
        assert report.max_deviation <= 1e-10

    def test_zero_data_without_sources_is_exact(self):
        cfg = small_cfg(params=params_with(J=0.0, c=0.0), amplitude=0.0,
                        grid=Grid2D(4, 4, 1.0), dt=0.002, n_steps=50, record_every=50)
        report = reduce_to_ode_check(cfg, "euler")
        assert report.max_deviation == 0.0
