"""Uniform 2-D grid, zero-flux (Neumann) Laplacian, and the explicit
diffusion stability bound.

Grid points sit at (i*dx, j*dx); the no-flux boundary runs half a cell
outside the extreme points, so the domain measure is nx*ny*dx**2.  The
Neumann condition is realized by ghost cells that replicate the nearest
interior value, which keeps the discrete flux sum exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid2D", "Field2D", "laplacian_neumann", "zero_flux_sum", "cfl_max_dt"]


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    dx: float

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs nx, ny >= 3, got {self.nx}x{self.ny}")
        if not self.dx > 0:
            raise ValueError(f"dx must be > 0, got {self.dx}")

    @property
    def domain_measure(self) -> float:
        return self.nx * self.ny * self.dx * self.dx


@dataclass(frozen=True)
class Field2D:
    values: np.ndarray
    grid: Grid2D

    def __post_init__(self):
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.grid.nx}x{self.grid.ny}"
            )
        if not np.isfinite(self.values).all():
            raise ValueError("field contains non-finite values")


def laplacian_array(values: np.ndarray, dx: float) -> np.ndarray:
    """5-point zero-flux Laplacian of one or more stacked fields.

    Works on any array whose last two axes are the grid axes.  The sum
    grouping (up+down)+(left+right) makes constant fields map to exact
    floating-point zero.
    """
    pad = [(0, 0)] * (values.ndim - 2) + [(1, 1), (1, 1)]
    p = np.pad(values, pad, mode="edge")
    up = p[..., :-2, 1:-1]
    down = p[..., 2:, 1:-1]
    left = p[..., 1:-1, :-2]
    right = p[..., 1:-1, 2:]
    return ((up + down) + (left + right) - 4.0 * values) / (dx * dx)


def laplacian_neumann(field: Field2D) -> Field2D:
    """Discrete Laplacian with reflecting (zero normal derivative) boundaries."""
    return Field2D(laplacian_array(field.values, field.grid.dx), field.grid)


def zero_flux_sum(field: Field2D) -> float:
    """Sum of the Neumann Laplacian over the grid.

    Discrete divergence theorem: interior face fluxes telescope and boundary
    fluxes vanish, so the result is zero up to rounding
    (|result| <= 1e-10 * max|field| * nx * ny).
    """
    return float(laplacian_array(field.values, field.grid.dx).sum())


def cfl_max_dt(params, grid: Grid2D, safety: float = 0.5) -> float:
    """Largest stable explicit time step for 2-D diffusion: safety*dx^2/(4 eta).

    Reaction stiffness is not included; the runtime finiteness check covers it.
    """
    if not 0 < safety <= 1:
        raise ValueError(f"safety must be in (0, 1], got {safety}")
    return safety * grid.dx * grid.dx / (4.0 * params.eta)
