"""Closed-form dissipativity and synchronization constants.

Given the network parameters, the nonlinearity bounds (lam, beta, phi_bar),
and explicit norm conventions, this module evaluates

    C1    = b*lam / (2*sigma^2)
    C2    = C1 + (C1/(2*lam))*((lam+k)^2 + J^2) + c^2/b
            + (4*sigma^2/(b*lam^2)) * (a^2/b + q^2/(2r))^2
    mu    = min{ 2a^2/b + q^2/r,  b/2,  r }
    K     = 1 + (2m/(mu*min{C1,1})) * (C1*||phi||^2 + C2*|Omega|_K)
    Q     = (18 sigma^2/lam^2) K
            + m * [ (18/lam^2)||phi||^2
                    + (3/2 + 18 J^2/lam^2 + 18 k^3/lam^3) |Omega|_Q ]
    Gamma = (1/m) (beta + k + |a - sigma|^2/(2b) + q^2/r
                   + C*^4 k^8 (1+Q)^2 / (eta^3 r^4))
    alpha = min{ b, r, 2mP - 2m*Gamma }

The coupling threshold P > Gamma is sufficient for exponential
synchronization of all pairwise differences at rate alpha; it is not
claimed necessary, so a failed threshold only means "no guarantee".

||phi||^2 and |Omega| enter as explicit NormConventions because published
reference values for K and Q are mutually consistent only under different
|Omega| choices; both conventions are recorded rather than silently picking
one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import Grid2D
from .model import NetworkParams, NonlinearityBounds

__all__ = [
    "NormConventions",
    "TheoryConstants",
    "ThresholdReport",
    "ThresholdUndefinedError",
    "VERDICT_GUARANTEED",
    "VERDICT_NO_GUARANTEE",
    "compute_C1",
    "compute_C2",
    "compute_mu",
    "compute_K",
    "compute_Q",
    "compute_Gamma",
    "compute_alpha",
    "threshold_report",
]

DEFAULT_C_STAR = 0.4  # interpolation-inequality coefficient; user-overridable

VERDICT_GUARANTEED = "synchronized-guaranteed"
VERDICT_NO_GUARANTEE = "no-guarantee"


class ThresholdUndefinedError(ValueError):
    """The Gronwall rate mu vanished, so no absorbing radius exists."""


@dataclass(frozen=True)
class NormConventions:
    """Values used for ||phi||^2 and |Omega| in the K and Q formulas."""

    phi_norm_sq: float
    omega_measure_K: float
    omega_measure_Q: float

    def __post_init__(self):
        for name in ("phi_norm_sq", "omega_measure_K", "omega_measure_Q"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def integral(cls, bounds: NonlinearityBounds, grid: Grid2D) -> "NormConventions":
        """Default convention: ||phi||^2 = phi_bar^2 * |Omega| and the same
        grid measure |Omega| = nx*ny*dx^2 everywhere."""
        measure = grid.domain_measure
        return cls(
            phi_norm_sq=bounds.phi_bar**2 * measure,
            omega_measure_K=measure,
            omega_measure_Q=measure,
        )


@dataclass(frozen=True)
class TheoryConstants:
    C1: float
    C2: float
    mu: float
    K: float
    Q: float
    Gamma: float
    alpha: float
    C_star: float
    conventions: NormConventions


@dataclass(frozen=True)
class ThresholdReport:
    constants: TheoryConstants
    P: float
    verdict: str

    @property
    def guaranteed(self) -> bool:
        return self.verdict == VERDICT_GUARANTEED


def compute_C1(params: NetworkParams, bounds: NonlinearityBounds) -> float:
    """Scaling constant C1 = b*lam / (2*sigma^2)."""
    if params.sigma <= 0:
        raise ValueError("C1 needs sigma > 0")
    return params.b * bounds.lam / 2.0 / params.sigma / params.sigma


def compute_C2(params: NetworkParams, bounds: NonlinearityBounds, C1: float) -> float:
    """Source-term constant of the energy estimate (see module docstring)."""
    p, lam = params, bounds.lam
    mixed = p.a**2 / p.b + p.q**2 / (2.0 * p.r)
    return (
        C1
        + (C1 / (2.0 * lam)) * ((lam + p.k) ** 2 + p.J**2)
        + p.c**2 / p.b
        + (4.0 * p.sigma**2 / (p.b * lam**2)) * mixed**2
    )


def compute_mu(params: NetworkParams) -> float:
    """Gronwall decay rate mu = min{2a^2/b + q^2/r, b/2, r}."""
    p = params
    return min(2.0 * p.a**2 / p.b + p.q**2 / p.r, p.b / 2.0, p.r)


def compute_K(
    params: NetworkParams,
    bounds: NonlinearityBounds,
    C1: float,
    C2: float,
    conv: NormConventions,
) -> float:
    """Absorbing-ball radius K = 1 + (2m/(mu*min{C1,1}))*(C1*||phi||^2 + C2*|Omega|)."""
    mu = compute_mu(params)
    if mu <= 0:
        raise ThresholdUndefinedError(f"mu = {mu} must be positive for an absorbing radius")
    return 1.0 + (2.0 * params.m / (mu * min(C1, 1.0))) * (
        C1 * conv.phi_norm_sq + C2 * conv.omega_measure_K
    )


def compute_Q(
    params: NetworkParams,
    bounds: NonlinearityBounds,
    K: float,
    conv: NormConventions,
) -> float:
    """Ultimate L4 bound constant; sum_i ||u_i||_L4^4 eventually stays below 1 + Q."""
    p, lam = params, bounds.lam
    return (18.0 * p.sigma**2 / lam**2) * K + p.m * (
        (18.0 / lam**2) * conv.phi_norm_sq
        + (1.5 + 18.0 * p.J**2 / lam**2 + 18.0 * p.k**3 / lam**3) * conv.omega_measure_Q
    )


def _gamma_sum(params: NetworkParams, bounds: NonlinearityBounds, Q: float, C_star: float) -> float:
    p = params
    return (
        bounds.beta
        + p.k
        + abs(p.a - p.sigma) ** 2 / (2.0 * p.b)
        + p.q**2 / p.r
        + C_star**4 * p.k**8 * (1.0 + Q) ** 2 / (p.eta**3 * p.r**4)
    )


def compute_Gamma(
    params: NetworkParams,
    bounds: NonlinearityBounds,
    Q: float,
    C_star: float = DEFAULT_C_STAR,
) -> float:
    """Coupling-strength threshold: P > Gamma guarantees synchronization."""
    return _gamma_sum(params, bounds, Q, C_star) / params.m


def compute_alpha(
    params: NetworkParams,
    bounds: NonlinearityBounds,
    Q: float,
    C_star: float,
    P: float,
) -> float:
    """Uniform exponential decay rate of the squared pairwise differences.

    min{b, r, 2mP - 2*(threshold sum)}; nonpositive values signal that the
    threshold condition is not met at this P.
    """
    p = params
    return min(p.b, p.r, 2.0 * p.m * P - 2.0 * _gamma_sum(params, bounds, Q, C_star))


def threshold_report(
    params: NetworkParams,
    bounds: NonlinearityBounds,
    C_star: float = DEFAULT_C_STAR,
    conv: NormConventions | None = None,
    grid: Grid2D | None = None,
) -> ThresholdReport:
    """Chain all constants and decide the threshold verdict for params.P.

    Either pass explicit conventions or a grid from which the integral
    convention is derived.  The threshold is sufficient-only: P <= Gamma
    yields "no-guarantee", never a claim of asynchrony.
    """
    if conv is None:
        if grid is None:
            raise ValueError("need either explicit conventions or a grid")
        conv = NormConventions.integral(bounds, grid)
    C1 = compute_C1(params, bounds)
    C2 = compute_C2(params, bounds, C1)
    mu = compute_mu(params)
    K = compute_K(params, bounds, C1, C2, conv)
    Q = compute_Q(params, bounds, K, conv)
    Gamma = compute_Gamma(params, bounds, Q, C_star)
    alpha = compute_alpha(params, bounds, Q, C_star, params.P)
    constants = TheoryConstants(
        C1=C1, C2=C2, mu=mu, K=K, Q=Q, Gamma=Gamma, alpha=alpha,
        C_star=C_star, conventions=conv,
    )
    verdict = VERDICT_GUARANTEED if params.P > Gamma else VERDICT_NO_GUARANTEE
    return ThresholdReport(constants=constants, P=params.P, verdict=verdict)
