"""Model data: network parameters, the cubic nonlinearity with its growth
bounds, and the stacked field state shared by the simulator and the metrics.

The membrane nonlinearity is the cubic f(s) = s(s - kappa)(1 - s).  Its
standard growth bounds are

    f(s) * s <= -lam * s**4 + phi_bar      (quartic damping)
    f'(s)    <= beta                       (derivative bound)

with the prototype choices lam = 1/4, phi_bar = (1 + kappa)**4 / 4 and
beta = (1 + kappa)**2 / 3.  ``verify_assumption`` checks any claimed bounds
by dense sampling plus the analytic maximizer of f'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .grid import Grid2D

__all__ = [
    "NetworkParams",
    "NonlinearityBounds",
    "NetworkState",
    "AssumptionReport",
    "f_eval",
    "f_derivative",
    "verify_assumption",
    "init_random",
    "validate_params",
]


@dataclass(frozen=True)
class NetworkParams:
    """Physical coefficients of the coupled network.

    eta    diffusion coefficient of the membrane potential
    sigma  recovery feedback strength in the potential equation
    J      reference potential (any real)
    k      memristor coupling strength (k * tanh(rho) * u term)
    a, c, b  recovery equation  w' = a u + c - b w
    q, r   memductance equation rho' = q u - r rho
    P      synaptic coupling strength (P = 0 allowed for control runs)
    m      neuron count

    Construction only checks finiteness so that degenerate corner values
    (sigma = 0, k = 0, ...) remain usable in formula-level checks; full
    invariants are enforced by ``validate_params`` at run boundaries.
    """

    eta: float
    sigma: float
    J: float
    k: float
    a: float
    b: float
    c: float
    q: float
    r: float
    P: float
    m: int

    def __post_init__(self):
        for name in ("eta", "sigma", "J", "k", "a", "b", "c", "q", "r", "P"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"parameter {name} must be finite, got {v!r}")
        if int(self.m) != self.m:
            raise ValueError(f"neuron count m must be an integer, got {self.m!r}")


def validate_params(params: NetworkParams) -> list[str]:
    """Full invariant check; returns a list of violation messages (empty = ok).

    All coefficients except J strictly positive, P >= 0, m >= 2.
    """
    problems = []
    for name in ("eta", "sigma", "k", "a", "b", "c", "q", "r"):
        if getattr(params, name) <= 0:
            problems.append(f"{name} must be > 0, got {getattr(params, name)}")
    if params.P < 0:
        problems.append(f"P must be >= 0, got {params.P}")
    if params.m < 2:
        problems.append(f"m must be >= 2, got {params.m}")
    return problems


@dataclass(frozen=True)
class NonlinearityBounds:
    """Growth bounds (lam, beta, phi_bar) claimed for the cubic with root kappa.

    phi_bar is the constant pointwise bound; the general space-dependent
    bound function is not needed for the constant prototype.
    """

    kappa: float
    lam: float
    beta: float
    phi_bar: float

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")
        for name in ("lam", "beta", "phi_bar"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def prototype(cls, kappa: float) -> "NonlinearityBounds":
        """Canonical bounds for f(s) = s(s - kappa)(1 - s):
        lam = 1/4, phi_bar = (1 + kappa)^4 / 4, beta = (1 + kappa)^2 / 3.
        """
        return cls(
            kappa=kappa,
            lam=0.25,
            beta=(1.0 + kappa) ** 2 / 3.0,
            phi_bar=(1.0 + kappa) ** 4 / 4.0,
        )


def f_eval(s, bounds: NonlinearityBounds):
    """Cubic membrane nonlinearity f(s) = s(s - kappa)(1 - s); vectorized."""
    return s * (s - bounds.kappa) * (1.0 - s)


def f_derivative(s, bounds: NonlinearityBounds):
    """f'(s) = -3 s^2 + 2(1 + kappa) s - kappa; vectorized."""
    return -3.0 * s * s + 2.0 * (1.0 + bounds.kappa) * s - bounds.kappa


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of sampling the two growth inequalities."""

    passed: bool
    n_samples: int
    sample_range: tuple[float, float]
    # (s, inequality name, lhs, rhs) for each violated sample, capped
    violations: tuple = ()
    n_violations: int = 0
    # the sample with the largest excess lhs - rhs, if any
    worst_violation: tuple | None = None

    MAX_RECORDED = 50


def verify_assumption(
    bounds: NonlinearityBounds,
    sample_range: tuple[float, float] = (-10.0, 10.0),
    n_samples: int = 10_000,
) -> AssumptionReport:
    """Check f(s)s <= -lam s^4 + phi_bar and f'(s) <= beta on a dense grid.

    The grid always includes s = (1 + kappa)/3, the analytic maximizer of f',
    so a too-small beta cannot slip between sample points.
    """
    if n_samples < 100:
        raise ValueError(f"n_samples must be >= 100, got {n_samples}")
    lo, hi = sample_range
    if not hi > lo:
        raise ValueError(f"empty sample range {sample_range!r}")

    s = np.linspace(lo, hi, n_samples)
    argmax_fprime = (1.0 + bounds.kappa) / 3.0
    if lo <= argmax_fprime <= hi:
        s = np.append(s, argmax_fprime)

    fs = f_eval(s, bounds)
    quartic_lhs = fs * s
    quartic_rhs = -bounds.lam * s**4 + bounds.phi_bar
    deriv_lhs = f_derivative(s, bounds)

    violations = []
    for idx in np.nonzero(quartic_lhs > quartic_rhs)[0]:
        violations.append((float(s[idx]), "quartic", float(quartic_lhs[idx]), float(quartic_rhs[idx])))
    for idx in np.nonzero(deriv_lhs > bounds.beta)[0]:
        violations.append((float(s[idx]), "derivative", float(deriv_lhs[idx]), float(bounds.beta)))

    worst = max(violations, key=lambda v: v[2] - v[3]) if violations else None
    return AssumptionReport(
        passed=not violations,
        n_samples=len(s),
        sample_range=(float(lo), float(hi)),
        violations=tuple(violations[: AssumptionReport.MAX_RECORDED]),
        n_violations=len(violations),
        worst_violation=worst,
    )


@dataclass
class NetworkState:
    """State of all m neurons on a shared grid: stacks of shape (m, nx, ny)
    for the membrane potential u, recovery w, and memductance rho."""

    grid: Grid2D
    u: np.ndarray
    w: np.ndarray
    rho: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        shape = self.u.shape
        if self.w.shape != shape or self.rho.shape != shape:
            raise ValueError(
                f"field stacks must share one shape, got u={self.u.shape} "
                f"w={self.w.shape} rho={self.rho.shape}"
            )
        if len(shape) != 3 or shape[1] != self.grid.nx or shape[2] != self.grid.ny:
            raise ValueError(
                f"field stacks must have shape (m, {self.grid.nx}, {self.grid.ny}), got {shape}"
            )

    @property
    def m(self) -> int:
        return self.u.shape[0]

    def copy(self) -> "NetworkState":
        return NetworkState(self.grid, self.u.copy(), self.w.copy(), self.rho.copy(), self.t)

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.u).all()
            and np.isfinite(self.w).all()
            and np.isfinite(self.rho).all()
        )


def init_random(
    grid: Grid2D,
    params: NetworkParams,
    amplitude: float = 0.05,
    seed: int = 0,
) -> NetworkState:
    """Seeded uniform initial data in [0, amplitude) for all 3m fields.

    Pure function of (grid, m, amplitude, seed): the same arguments always
    reproduce a bit-identical state.  amplitude = 0 gives the zero state.
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    rng = np.random.default_rng(seed)
    block = rng.random((3, params.m, grid.nx, grid.ny)) * amplitude
    return NetworkState(grid, block[0], block[1], block[2], t=0.0)
