"""memfhn: coupled memristive FitzHugh-Nagumo reaction-diffusion networks.

Simulation of m fully coupled neurons on a 2-D zero-flux grid, closed-form
dissipativity and synchronization-threshold constants, empirical checks of
the predicted decay envelopes, and independent numerical oracles.
"""

from .grid import Field2D, Grid2D, cfl_max_dt, laplacian_neumann, zero_flux_sum
from .metrics import (
    DecayFit,
    MetricsSeries,
    absorbing_check,
    asynchronous_degree_estimate,
    fit_decay_rate,
    l2_norm_sq,
    l4_norm_4,
    pairwise_differences,
    sync_envelope_check,
)
from .model import (
    NetworkParams,
    NetworkState,
    NonlinearityBounds,
    f_eval,
    init_random,
    verify_assumption,
)
from .simulate import RunConfig, SimulationDiverged, integrate, rhs, step_euler, step_rk4
from .theory import (
    NormConventions,
    TheoryConstants,
    ThresholdReport,
    compute_C1,
    compute_C2,
    compute_Gamma,
    compute_K,
    compute_Q,
    compute_alpha,
    compute_mu,
    threshold_report,
)

__version__ = "0.1.0"

__all__ = [
    "Field2D",
    "Grid2D",
    "cfl_max_dt",
    "laplacian_neumann",
    "zero_flux_sum",
    "DecayFit",
    "MetricsSeries",
    "absorbing_check",
    "asynchronous_degree_estimate",
    "fit_decay_rate",
    "l2_norm_sq",
    "l4_norm_4",
    "pairwise_differences",
    "sync_envelope_check",
    "NetworkParams",
    "NetworkState",
    "NonlinearityBounds",
    "f_eval",
    "init_random",
    "verify_assumption",
    "RunConfig",
    "SimulationDiverged",
    "integrate",
    "rhs",
    "step_euler",
    "step_rk4",
    "NormConventions",
    "TheoryConstants",
    "ThresholdReport",
    "compute_C1",
    "compute_C2",
    "compute_Gamma",
    "compute_K",
    "compute_Q",
    "compute_alpha",
    "compute_mu",
    "threshold_report",
    "__version__",
]
