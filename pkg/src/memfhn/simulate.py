"""Coupled network right-hand side and explicit time stepping.

Per neuron i on the shared grid,

    du_i/dt   = eta * Lap(u_i) + f(u_i) - sigma*w_i + J
                - k*tanh(rho_i)*u_i + P*(S - m*u_i)
    dw_i/dt   = a*u_i + c - b*w_i
    drho_i/dt = q*u_i - r*rho_i

with S = sum_j u_j, so the all-to-all coupling sum_j P*(u_j - u_i) costs
O(m) per grid point.  S is accumulated once per evaluation in ascending
neuron order, which makes runs bit-reproducible and permutation-equivariant.

Forward Euler is the production scheme; classical RK4 exists as a
higher-order option for oracle comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid2D, cfl_max_dt, laplacian_array
from .metrics import MetricsRecorder, MetricsSeries
from .model import (
    NetworkParams,
    NetworkState,
    NonlinearityBounds,
    f_eval,
    init_random,
    validate_params,
)

__all__ = [
    "RunConfig",
    "SimulationDiverged",
    "rhs",
    "step_euler",
    "step_rk4",
    "integrate",
]


class SimulationDiverged(RuntimeError):
    """Raised when a state or derivative stops being finite.

    ``partial_series`` carries whatever metrics were recorded before the
    failure when the error escapes ``integrate``.
    """

    def __init__(self, message: str, partial_series: MetricsSeries | None = None):
        super().__init__(message)
        self.partial_series = partial_series


@dataclass(frozen=True)
class RunConfig:
    """Everything a deterministic network run needs."""

    params: NetworkParams
    bounds: NonlinearityBounds
    grid: Grid2D
    dt: float
    n_steps: int
    seed: int = 0
    amplitude: float = 0.05
    record_every: int = 1
    snapshot_every: int = 0  # 0 = never

    def __post_init__(self):
        problems = validate_params(self.params)
        limit = cfl_max_dt(self.params, self.grid, safety=1.0)
        if not 0 < self.dt <= limit:
            problems.append(
                f"dt={self.dt} outside (0, {limit}] from cfl_max_dt(eta={self.params.eta}, "
                f"dx={self.grid.dx})"
            )
        if self.n_steps < 1:
            problems.append(f"n_steps must be >= 1, got {self.n_steps}")
        if self.record_every < 1:
            problems.append(f"record_every must be >= 1, got {self.record_every}")
        if self.snapshot_every < 0:
            problems.append(f"snapshot_every must be >= 0, got {self.snapshot_every}")
        if problems:
            raise ValueError("; ".join(problems))

    def initial_state(self) -> NetworkState:
        return init_random(self.grid, self.params, self.amplitude, self.seed)


def _first_bad(stack: np.ndarray) -> tuple[int, int, int]:
    i, x, y = np.argwhere(~np.isfinite(stack))[0]
    return int(i), int(x), int(y)


def _check_input_finite(state: NetworkState):
    for name, stack in (("u", state.u), ("w", state.w), ("rho", state.rho)):
        if not np.isfinite(stack).all():
            i, x, y = _first_bad(stack)
            raise SimulationDiverged(
                f"non-finite {name} at neuron {i}, grid point ({x}, {y}), t={state.t:g}"
            )


def _rhs_arrays(
    u: np.ndarray,
    w: np.ndarray,
    rho: np.ndarray,
    params: NetworkParams,
    bounds: NonlinearityBounds,
    dx: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lap = laplacian_array(u, dx)
    s = np.add.reduce(u, axis=0)  # fixed ascending neuron order
    du = (
        params.eta * lap
        + f_eval(u, bounds)
        - params.sigma * w
        + params.J
        - params.k * np.tanh(rho) * u
        + params.P * (s - params.m * u)
    )
    dw = params.a * u + params.c - params.b * w
    drho = params.q * u - params.r * rho
    return du, dw, drho


def rhs(
    state: NetworkState,
    params: NetworkParams,
    bounds: NonlinearityBounds,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Time derivative (du, dw, drho) of the full network state."""
    _check_input_finite(state)
    return _rhs_arrays(state.u, state.w, state.rho, params, bounds, state.grid.dx)


def _check_result(u, w, rho, t) -> None:
    for name, stack in (("u", u), ("w", w), ("rho", rho)):
        if not np.isfinite(stack).all():
            i, x, y = _first_bad(stack)
            raise SimulationDiverged(
                f"step produced non-finite {name} at neuron {i}, "
                f"grid point ({x}, {y}), t={t:g}"
            )


def step_euler(state: NetworkState, cfg: RunConfig) -> NetworkState:
    """One forward-Euler step of size cfg.dt."""
    du, dw, drho = rhs(state, cfg.params, cfg.bounds)
    dt = cfg.dt
    u = state.u + dt * du
    w = state.w + dt * dw
    rho = state.rho + dt * drho
    t = state.t + dt
    _check_result(u, w, rho, t)
    return NetworkState(state.grid, u, w, rho, t)


def step_rk4(state: NetworkState, cfg: RunConfig) -> NetworkState:
    """One classical four-stage Runge-Kutta step of size cfg.dt."""
    p, b, dx = cfg.params, cfg.bounds, state.grid.dx
    dt = cfg.dt
    _check_input_finite(state)
    u0, w0, r0 = state.u, state.w, state.rho

    k1 = _rhs_arrays(u0, w0, r0, p, b, dx)
    k2 = _rhs_arrays(u0 + 0.5 * dt * k1[0], w0 + 0.5 * dt * k1[1], r0 + 0.5 * dt * k1[2], p, b, dx)
    k3 = _rhs_arrays(u0 + 0.5 * dt * k2[0], w0 + 0.5 * dt * k2[1], r0 + 0.5 * dt * k2[2], p, b, dx)
    k4 = _rhs_arrays(u0 + dt * k3[0], w0 + dt * k3[1], r0 + dt * k3[2], p, b, dx)

    sixth = dt / 6.0
    u = u0 + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    w = w0 + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    rho = r0 + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    t = state.t + dt
    _check_result(u, w, rho, t)
    return NetworkState(state.grid, u, w, rho, t)


_STEPPERS: dict[str, Callable[[NetworkState, RunConfig], NetworkState]] = {
    "euler": step_euler,
    "rk4": step_rk4,
}


def integrate(
    cfg: RunConfig,
    on_metrics: Callable[[dict], None] | None = None,
    on_snapshot: Callable[[int, NetworkState], None] | None = None,
    method: str = "euler",
    initial_state: NetworkState | None = None,
) -> tuple[NetworkState, MetricsSeries]:
    """Run cfg.n_steps steps from the seeded initial state.

    Metrics are recorded after every cfg.record_every-th step and streamed
    to ``on_metrics`` if given; ``on_snapshot`` receives (step, state) every
    cfg.snapshot_every steps.  Deterministic: the same cfg always produces a
    bit-identical series.  On divergence the partially recorded series is
    attached to the raised SimulationDiverged.
    """
    if method not in _STEPPERS:
        raise ValueError(f"unknown method {method!r}, expected one of {sorted(_STEPPERS)}")
    step = _STEPPERS[method]
    state = cfg.initial_state() if initial_state is None else initial_state
    recorder = MetricsRecorder()
    try:
        for n in range(1, cfg.n_steps + 1):
            state = step(state, cfg)
            if n % cfg.record_every == 0:
                row = recorder.record(state)
                if on_metrics is not None:
                    on_metrics(row)
            if cfg.snapshot_every and n % cfg.snapshot_every == 0 and on_snapshot is not None:
                on_snapshot(n, state)
    except SimulationDiverged as exc:
        partial = recorder.series() if len(recorder) else None
        raise SimulationDiverged(f"{exc} (during step {n} of {cfg.n_steps})", partial) from None
    if len(recorder) == 0:
        # record_every larger than the run: still return the final point
        recorder.record(state)
    return state, recorder.series()
