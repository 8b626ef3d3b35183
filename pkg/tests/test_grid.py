import numpy as np
import pytest

from memfhn.grid import Field2D, Grid2D, cfl_max_dt, laplacian_neumann, zero_flux_sum
from memfhn.verification import laplacian_oracle, spatial_order_errors
from tests.helpers import params_with


def field(values, dx=1.0):
    arr = np.asarray(values, dtype=float)
    return Field2D(arr, Grid2D(arr.shape[0], arr.shape[1], dx))


class TestLaplacian:
    def test_annihilates_constants_exactly(self):
        for c in (1.0, 0.7311, np.pi, -3.25e4):
            lap = laplacian_neumann(field(np.full((9, 7), c)))
            assert not lap.values.any()

    def test_interior_impulse_stencil(self):
        vals = np.zeros((7, 7))
        vals[3, 3] = 1.0
        lap = laplacian_neumann(field(vals)).values
        assert lap[3, 3] == -4.0
        for i, j in ((2, 3), (4, 3), (3, 2), (3, 4)):
            assert lap[i, j] == 1.0
        lap[3, 3] = 0.0
        lap[2, 3] = lap[4, 3] = lap[3, 2] = lap[3, 4] = 0.0
        assert not lap.any()

    def test_matches_loop_oracle_on_random_fields(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            vals = rng.standard_normal((11, 13))
            got = laplacian_neumann(field(vals, dx=0.5)).values
            want = laplacian_oracle(vals, 0.5)
            assert np.abs(got - want).max() <= 1e-12

    def test_cosine_eigenfield_on_33x33(self):
        # cell-centered cosine: an exact eigenvector of the discrete operator
        n, dx = 33, 1.0
        length = n * dx
        centers = (np.arange(n) + 0.5) * dx
        fx = np.cos(np.pi * centers / length)
        vals = np.outer(fx, fx)
        got = laplacian_neumann(field(vals, dx)).values
        want = laplacian_oracle(vals, dx)
        assert np.abs(got - want).max() <= 1e-12
        discrete_eig = -4.0 * np.sin(np.pi / (2 * n)) ** 2 / dx**2 * 2
        continuum_eig = -2.0 * (np.pi / length) ** 2
        mask = np.abs(vals) > 1e-3
        ratio = got[mask] / vals[mask]
        assert ratio == pytest.approx(discrete_eig, rel=1e-10)
        assert discrete_eig == pytest.approx(continuum_eig, rel=1e-2)

    def test_second_order_convergence_to_continuum(self):
        errors, orders = spatial_order_errors(length=33.0, resolutions=(33, 66, 132))
        assert errors[0] > errors[1] > errors[2]
        for order in orders:
            assert order == pytest.approx(2.0, abs=0.2)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        f1 = rng.standard_normal((10, 10))
        f2 = rng.standard_normal((10, 10))
        a, b = 1.37, -2.6
        lhs = laplacian_neumann(field(a * f1 + b * f2)).values
        rhs = a * laplacian_neumann(field(f1)).values + b * laplacian_neumann(field(f2)).values
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(5)
        sym = rng.standard_normal((9, 9))
        sym = sym + sym.T
        lap = laplacian_neumann(field(sym)).values
        assert np.array_equal(lap, lap.T)


class TestZeroFluxSum:
    def test_constant_exactly_zero(self):
        assert zero_flux_sum(field(np.full((12, 12), 2.5))) == 0.0

    def test_impulse_exactly_zero(self):
        vals = np.zeros((9, 9))
        vals[4, 4] = 1.0
        assert zero_flux_sum(field(vals)) == 0.0

    def test_random_fields_within_budget(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            vals = rng.standard_normal((16, 16)) * 10
            total = abs(zero_flux_sum(field(vals, dx=0.25)))
            assert total <= 1e-10 * np.abs(vals).max() * vals.size


class TestCfl:
    def test_published_setup_has_wide_margin(self):
        grid = Grid2D(32, 32, 1.0)
        bound = cfl_max_dt(params_with(), grid, safety=1.0)
        assert bound == 0.025
        assert 0.00025 <= bound / 100  # the reference run sits 100x below

    def test_eta_doubling_halves_bound(self):
        grid = Grid2D(8, 8, 1.0)
        assert cfl_max_dt(params_with(eta=20.0), grid, 1.0) == \
            cfl_max_dt(params_with(eta=10.0), grid, 1.0) / 2

    def test_dx_doubling_quadruples_bound(self):
        assert cfl_max_dt(params_with(), Grid2D(8, 8, 2.0), 1.0) == \
            4 * cfl_max_dt(params_with(), Grid2D(8, 8, 1.0), 1.0)

    def test_safety_range(self):
        grid = Grid2D(8, 8, 1.0)
        with pytest.raises(ValueError):
            cfl_max_dt(params_with(), grid, 0.0)
        with pytest.raises(ValueError):
            cfl_max_dt(params_with(), grid, 1.5)


class TestContainers:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Grid2D(2, 8, 1.0)
        with pytest.raises(ValueError):
            Grid2D(8, 8, 0.0)

    def test_domain_measure(self):
        assert Grid2D(32, 32, 1.0).domain_measure == 1024.0
        assert Grid2D(8, 4, 0.5).domain_measure == 8.0

    def test_field_shape_and_finiteness(self):
        grid = Grid2D(4, 4, 1.0)
        with pytest.raises(ValueError):
            Field2D(np.zeros((4, 5)), grid)
        bad = np.zeros((4, 4))
        bad[1, 2] = np.nan
        with pytest.raises(ValueError):
            Field2D(bad, grid)
