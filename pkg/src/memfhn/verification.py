"""Independent oracles for the production numerics, exposed both to the
test suite and to the ``verify`` command.

Every oracle recomputes its target a different way: the stencil by explicit
index loops, the all-to-all coupling by the O(m^2) double sum, the reduced
dynamics by a pure-Python RK4 on the 3m-dimensional system that a spatially
constant state collapses to, and the discretization orders by Richardson
comparison against refined references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, laplacian_array
from .model import NetworkState, NonlinearityBounds
from .simulate import RunConfig, integrate

__all__ = [
    "CheckResult",
    "OdeReductionReport",
    "laplacian_oracle",
    "rhs_coupling_oracle",
    "ode_reference_rk4",
    "reduce_to_ode_check",
    "spatial_order_errors",
    "temporal_order_errors",
    "run_verification_suite",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def laplacian_oracle(values: np.ndarray, dx: float) -> np.ndarray:
    """Loop-coded 5-point stencil with reflecting ghosts (reference only)."""
    nx, ny = values.shape
    out = np.empty_like(values)
    for i in range(nx):
        for j in range(ny):
            up = values[i - 1, j] if i > 0 else values[i, j]
            down = values[i + 1, j] if i < nx - 1 else values[i, j]
            left = values[i, j - 1] if j > 0 else values[i, j]
            right = values[i, j + 1] if j < ny - 1 else values[i, j]
            out[i, j] = ((up + down) + (left + right) - 4.0 * values[i, j]) / (dx * dx)
    return out


def rhs_coupling_oracle(state: NetworkState, params, bounds) -> tuple[np.ndarray, ...]:
    """Network right-hand side with the coupling done as the explicit
    double sum over neuron pairs instead of the O(m) field-sum shortcut."""
    m = state.m
    dx = state.grid.dx
    du = np.empty_like(state.u)
    dw = np.empty_like(state.w)
    drho = np.empty_like(state.rho)
    for i in range(m):
        u_i, w_i, rho_i = state.u[i], state.w[i], state.rho[i]
        coupling = np.zeros_like(u_i)
        for j in range(m):
            coupling = coupling + params.P * (state.u[j] - u_i)
        f_i = u_i * (u_i - bounds.kappa) * (1.0 - u_i)
        du[i] = (
            params.eta * laplacian_oracle(u_i, dx)
            + f_i
            - params.sigma * w_i
            + params.J
            - params.k * np.tanh(rho_i) * u_i
            + coupling
        )
        dw[i] = params.a * u_i + params.c - params.b * w_i
        drho[i] = params.q * u_i - params.r * rho_i
    return du, dw, drho


def ode_reference_rk4(
    params,
    bounds: NonlinearityBounds,
    u0: list[float],
    w0: list[float],
    rho0: list[float],
    dt: float,
    n_steps: int,
) -> tuple[list[float], list[float], list[float]]:
    """Pure-Python classical RK4 on the 3m-dimensional reduced system.

    Deliberately shares no array code with the simulator: plain floats,
    explicit loops, math.tanh.
    """
    m = params.m
    kappa = bounds.kappa
    sig, J, k = params.sigma, params.J, params.k
    a, b, c = params.a, params.b, params.c
    q, r, P = params.q, params.r, params.P
    tanh = math.tanh

    def deriv(u, w, rho):
        s = 0.0
        for v in u:
            s += v
        du, dw, drho = [], [], []
        for i in range(m):
            ui = u[i]
            du.append(
                ui * (ui - kappa) * (1.0 - ui)
                - sig * w[i]
                + J
                - k * tanh(rho[i]) * ui
                + P * (s - m * ui)
            )
            dw.append(a * ui + c - b * w[i])
            drho.append(q * ui - r * rho[i])
        return du, dw, drho

    u, w, rho = list(u0), list(w0), list(rho0)
    half = dt / 2.0
    sixth = dt / 6.0
    for _ in range(n_steps):
        k1u, k1w, k1r = deriv(u, w, rho)
        k2u, k2w, k2r = deriv(
            [u[i] + half * k1u[i] for i in range(m)],
            [w[i] + half * k1w[i] for i in range(m)],
            [rho[i] + half * k1r[i] for i in range(m)],
        )
        k3u, k3w, k3r = deriv(
            [u[i] + half * k2u[i] for i in range(m)],
            [w[i] + half * k2w[i] for i in range(m)],
            [rho[i] + half * k2r[i] for i in range(m)],
        )
        k4u, k4w, k4r = deriv(
            [u[i] + dt * k3u[i] for i in range(m)],
            [w[i] + dt * k3w[i] for i in range(m)],
            [rho[i] + dt * k3r[i] for i in range(m)],
        )
        u = [u[i] + sixth * (k1u[i] + 2.0 * (k2u[i] + k3u[i]) + k4u[i]) for i in range(m)]
        w = [w[i] + sixth * (k1w[i] + 2.0 * (k2w[i] + k3w[i]) + k4w[i]) for i in range(m)]
        rho = [rho[i] + sixth * (k1r[i] + 2.0 * (k2r[i] + k3r[i]) + k4r[i]) for i in range(m)]
    return u, w, rho


@dataclass(frozen=True)
class OdeReductionReport:
    method: str
    t_end: float
    max_deviation: float
    spatial_variation: float
    per_field_deviation: dict


def reduce_to_ode_check(cfg: RunConfig, method: str = "euler") -> OdeReductionReport:
    """Integrate spatially constant data with the PDE machinery and compare
    the point values at t_end against an RK4 reference at dt/100."""
    rng = np.random.default_rng(cfg.seed)
    consts = rng.random((3, cfg.params.m)) * cfg.amplitude
    shape = (cfg.params.m, cfg.grid.nx, cfg.grid.ny)
    state = NetworkState(
        grid=cfg.grid,
        u=np.ones(shape) * consts[0][:, None, None],
        w=np.ones(shape) * consts[1][:, None, None],
        rho=np.ones(shape) * consts[2][:, None, None],
        t=0.0,
    )
    final, _ = integrate(cfg, method=method, initial_state=state)

    ref_u, ref_w, ref_rho = ode_reference_rk4(
        cfg.params, cfg.bounds,
        [float(v) for v in consts[0]],
        [float(v) for v in consts[1]],
        [float(v) for v in consts[2]],
        cfg.dt / 100.0,
        cfg.n_steps * 100,
    )

    deviations = {}
    spatial = 0.0
    for name, stack, ref in (("u", final.u, ref_u), ("w", final.w, ref_w),
                             ("rho", final.rho, ref_rho)):
        per_neuron = stack.reshape(cfg.params.m, -1)
        spatial = max(spatial, float((per_neuron.max(axis=1) - per_neuron.min(axis=1)).max()))
        deviations[name] = max(
            abs(float(per_neuron[i, 0]) - ref[i]) for i in range(cfg.params.m)
        )
    return OdeReductionReport(
        method=method,
        t_end=final.t,
        max_deviation=max(deviations.values()),
        spatial_variation=spatial,
        per_field_deviation=deviations,
    )


def spatial_order_errors(
    length: float = 32.0,
    resolutions: tuple[int, ...] = (16, 32, 64),
) -> tuple[list[float], list[float]]:
    """Stencil error against the continuum Laplacian of a product cosine.

    The cosine is sampled at the cell centers (i + 1/2) * dx of a fixed
    domain of the given side length, where it satisfies the discrete
    zero-flux boundary exactly; errors shrink at second order in dx.
    Returns (errors, observed orders between successive refinements).
    """
    errors = []
    for n in resolutions:
        dx = length / n
        centers = (np.arange(n) + 0.5) * dx
        fx = np.cos(np.pi * centers / length)
        field = np.outer(fx, fx)
        exact = -2.0 * (np.pi / length) ** 2 * field
        approx = laplacian_array(field, dx)
        errors.append(float(np.abs(approx - exact).max()))
    orders = [
        math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)
    ]
    return errors, orders


def temporal_order_errors(
    base_cfg: RunConfig,
    t_end: float = 0.25,
    dts: tuple[float, ...] = (2.5e-3, 1.25e-3, 6.25e-4),
    ref_dt: float = 6.25e-5,
    method: str = "euler",
) -> tuple[list[float], float]:
    """Global error of the chosen stepper at t_end against an RK4 run at
    ref_dt on the same configuration.  Returns (errors, fitted slope).

    Every dt (and ref_dt) must divide t_end, otherwise the comparison would
    measure a time offset instead of the truncation error.
    """
    from dataclasses import replace

    def final_state(dt: float, how: str) -> NetworkState:
        n = round(t_end / dt)
        if abs(n * dt - t_end) > 1e-9 * t_end:
            raise ValueError(f"dt={dt} does not divide t_end={t_end}")
        cfg = replace(base_cfg, dt=dt, n_steps=n, record_every=n)
        state, _ = integrate(cfg, method=how)
        return state

    ref = final_state(ref_dt, "rk4")
    errors = []
    for dt in dts:
        st = final_state(dt, method)
        err = max(
            float(np.abs(st.u - ref.u).max()),
            float(np.abs(st.w - ref.w).max()),
            float(np.abs(st.rho - ref.rho).max()),
        )
        errors.append(err)
    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return errors, slope


def _shrunk_reference_cfg() -> RunConfig:
    # the published parameter set on an 8x8 grid; dt/n_steps are overridden
    # by each order measurement
    from .repro import load_paper_config

    doc = load_paper_config()
    return RunConfig(
        params=doc.params,
        bounds=doc.bounds,
        grid=Grid2D(8, 8, doc.grid.dx),
        dt=doc.dt,
        n_steps=10,
        seed=doc.seed,
        amplitude=doc.amplitude,
        record_every=10,
    )


def run_verification_suite(seed: int = 7) -> list[CheckResult]:
    """All oracle checks, in a stable order, for the ``verify`` command."""
    from .simulate import rhs

    rng = np.random.default_rng(seed)
    results = []

    # vectorized stencil vs loop oracle
    worst = 0.0
    grid = Grid2D(16, 16, 0.5)
    for _ in range(20):
        field = rng.standard_normal((16, 16))
        worst = max(worst, float(np.abs(
            laplacian_array(field, grid.dx) - laplacian_oracle(field, grid.dx)
        ).max()))
    results.append(CheckResult(
        "stencil-oracle", worst <= 1e-12,
        f"max |fast - loop oracle| = {worst:.3e} (tol 1e-12)",
    ))

    # discrete divergence theorem
    worst_flux = 0.0
    for _ in range(100):
        field = rng.standard_normal((16, 16))
        total = abs(float(laplacian_array(field, 0.5).sum()))
        budget = 1e-10 * float(np.abs(field).max()) * field.size
        worst_flux = max(worst_flux, total / budget)
    results.append(CheckResult(
        "stencil-zero-flux", worst_flux <= 1.0,
        f"worst flux-sum over budget = {worst_flux:.3e} (must be <= 1)",
    ))

    # spatial order
    errors, orders = spatial_order_errors()
    ok = all(abs(o - 2.0) <= 0.2 for o in orders)
    results.append(CheckResult(
        "spatial-order", ok,
        f"observed orders {['%.3f' % o for o in orders]} (want 2.0 +/- 0.2)",
    ))

    # coupling oracle
    doc_cfg = _shrunk_reference_cfg()
    worst_rhs = 0.0
    from dataclasses import replace as _replace
    for m in (2, 3, 4, 8):
        params = _replace(doc_cfg.params, m=m)
        for _ in range(20):
            state = NetworkState(
                grid=doc_cfg.grid,
                u=rng.random((m, 8, 8)),
                w=rng.random((m, 8, 8)),
                rho=rng.random((m, 8, 8)),
            )
            got = rhs(state, params, doc_cfg.bounds)
            want = rhs_coupling_oracle(state, params, doc_cfg.bounds)
            for g, o in zip(got, want):
                worst_rhs = max(worst_rhs, float(np.abs(g - o).max()))
    results.append(CheckResult(
        "coupling-oracle", worst_rhs <= 1e-12,
        f"max |O(m) rhs - O(m^2) oracle| = {worst_rhs:.3e} over m in (2,3,4,8) (tol 1e-12)",
    ))

    # reduction to the 3m-dimensional system, both steppers
    red_cfg = _replace(doc_cfg, grid=Grid2D(4, 4, 1.0), dt=0.00025, n_steps=4000,
                       record_every=4000)
    euler = reduce_to_ode_check(red_cfg, "euler")
    results.append(CheckResult(
        "ode-reduction-euler", euler.max_deviation <= 1e-3,
        f"max deviation {euler.max_deviation:.3e} at t=1 (tol 1e-3), "
        f"spatial drift {euler.spatial_variation:.1e}",
    ))
    rk4 = reduce_to_ode_check(red_cfg, "rk4")
    results.append(CheckResult(
        "ode-reduction-rk4", rk4.max_deviation <= 1e-8,
        f"max deviation {rk4.max_deviation:.3e} at t=1 (tol 1e-8), "
        f"spatial drift {rk4.spatial_variation:.1e}",
    ))

    # temporal orders on the shrunk configuration; RK4 gets larger steps so
    # its errors stay above the rounding floor
    _, euler_slope = temporal_order_errors(doc_cfg, method="euler")
    results.append(CheckResult(
        "temporal-order-euler", abs(euler_slope - 1.0) <= 0.2,
        f"observed order {euler_slope:.3f} (want 1.0 +/- 0.2)",
    ))
    _, rk4_slope = temporal_order_errors(doc_cfg, dts=(5e-3, 2.5e-3, 1.25e-3), method="rk4")
    results.append(CheckResult(
        "temporal-order-rk4", rk4_slope >= 3.5,
        f"observed order {rk4_slope:.3f} (want >= 3.5)",
    ))

    return results
