"""Discrete norms, pairwise neuron differences, decay-rate fitting, and the
empirical checks matched against the closed-form theory constants.

All norms are grid L2 quantities: ||v||^2 = dx^2 * sum(v^2).  The pairwise
difference for neurons i < j is

    D_ij = ||u_i - u_j||^2 + ||w_i - w_j||^2 + ||rho_i - rho_j||^2,

the squared distance in the product energy space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field2D
from .model import NetworkState

__all__ = [
    "MetricsSeries",
    "DecayFit",
    "AbsorbingReport",
    "L4BoundReport",
    "EnvelopeReport",
    "l2_norm_sq",
    "l4_norm_4",
    "pair_indices",
    "pairwise_differences",
    "asynchronous_degree_estimate",
    "fit_decay_rate",
    "absorbing_check",
    "l4_bound_check",
    "sync_envelope_check",
    "state_metrics_row",
]


def l2_norm_sq(field: Field2D) -> float:
    """Squared grid L2 norm: dx^2 * sum(values^2)."""
    v = field.values
    return float((v * v).sum() * field.grid.dx * field.grid.dx)


def l4_norm_4(field: Field2D) -> float:
    """Fourth power of the grid L4 norm: dx^2 * sum(values^4)."""
    v = field.values
    v2 = v * v
    return float((v2 * v2).sum() * field.grid.dx * field.grid.dx)


def pair_indices(m: int) -> list[tuple[int, int]]:
    """All (i, j) with 0 <= i < j < m, lexicographic."""
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def _stack_norm_sq(stack: np.ndarray, dx: float) -> np.ndarray:
    # per-neuron dx^2 * sum over the grid axes
    return (stack * stack).sum(axis=(1, 2)) * dx * dx


def pairwise_differences(state: NetworkState) -> np.ndarray:
    """Condensed vector of D_ij over all pairs i < j (see pair_indices)."""
    if state.m < 2:
        raise ValueError("pairwise differences need at least 2 neurons")
    dx = state.grid.dx
    out = np.empty(state.m * (state.m - 1) // 2)
    n = 0
    for i in range(state.m):
        for j in range(i + 1, state.m):
            du = state.u[i] - state.u[j]
            dw = state.w[i] - state.w[j]
            dr = state.rho[i] - state.rho[j]
            out[n] = ((du * du).sum() + (dw * dw).sum() + (dr * dr).sum()) * dx * dx
            n += 1
    return out


@dataclass(frozen=True)
class MetricsSeries:
    """Time series of per-neuron norms, energies, and pairwise differences.

    Shapes: times (n,), per-neuron arrays (n, m), pair_d (n, m(m-1)/2) in
    pair_indices order.  u/w/rho norms are L2 norms (not squared);
    g_norm_sq is the squared energy-space norm per neuron.
    """

    times: np.ndarray
    u_norm: np.ndarray
    w_norm: np.ndarray
    rho_norm: np.ndarray
    g_norm_sq: np.ndarray
    total_energy: np.ndarray
    u_l4_total: np.ndarray
    pair_d: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if n == 0:
            raise ValueError("metrics series must be nonempty")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in ("u_norm", "w_norm", "rho_norm", "g_norm_sq", "total_energy",
                     "u_l4_total", "pair_d"):
            arr = getattr(self, name)
            if arr.shape[0] != n:
                raise ValueError(f"{name} has {arr.shape[0]} rows, expected {n}")
            if np.any(arr < 0):
                raise ValueError(f"{name} contains negative entries")

    @property
    def m(self) -> int:
        return self.u_norm.shape[1]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return pair_indices(self.m)

    def column_names(self) -> list[str]:
        m = self.m
        names = ["t"]
        names += [f"u_norm_{i + 1}" for i in range(m)]
        names += [f"w_norm_{i + 1}" for i in range(m)]
        names += [f"rho_norm_{i + 1}" for i in range(m)]
        names += [f"g_norm_sq_{i + 1}" for i in range(m)]
        names += ["total_energy", "u_l4_total"]
        names += [f"D_{i + 1}_{j + 1}" for i, j in self.pairs]
        return names

    def row(self, idx: int) -> list[float]:
        return (
            [float(self.times[idx])]
            + [float(x) for x in self.u_norm[idx]]
            + [float(x) for x in self.w_norm[idx]]
            + [float(x) for x in self.rho_norm[idx]]
            + [float(x) for x in self.g_norm_sq[idx]]
            + [float(self.total_energy[idx]), float(self.u_l4_total[idx])]
            + [float(x) for x in self.pair_d[idx]]
        )

    def column(self, name: str) -> np.ndarray:
        """Column by CSV name (neuron and pair labels are 1-based)."""
        names = self.column_names()
        if name not in names:
            raise KeyError(f"unknown column {name!r}")
        idx = names.index(name)
        rows = np.array([self.row(i) for i in range(len(self.times))])
        return rows[:, idx]

    def total_pair_d(self) -> np.ndarray:
        return self.pair_d.sum(axis=1)


def state_metrics_row(state: NetworkState) -> dict:
    """All metric entries for one state, keyed for the series recorder."""
    dx = state.grid.dx
    u_sq = _stack_norm_sq(state.u, dx)
    w_sq = _stack_norm_sq(state.w, dx)
    rho_sq = _stack_norm_sq(state.rho, dx)
    g_sq = u_sq + w_sq + rho_sq
    u2 = state.u * state.u
    l4 = float((u2 * u2).sum() * dx * dx)
    return {
        "t": state.t,
        "u_norm": np.sqrt(u_sq),
        "w_norm": np.sqrt(w_sq),
        "rho_norm": np.sqrt(rho_sq),
        "g_norm_sq": g_sq,
        "total_energy": float(g_sq.sum()),
        "u_l4_total": l4,
        "pair_d": pairwise_differences(state),
    }


class MetricsRecorder:
    """Accumulates rows during a run and freezes them into a MetricsSeries."""

    def __init__(self):
        self._rows = []

    def record(self, state: NetworkState) -> dict:
        row = state_metrics_row(state)
        self._rows.append(row)
        return row

    def __len__(self) -> int:
        return len(self._rows)

    def series(self) -> MetricsSeries:
        if not self._rows:
            raise ValueError("no metrics were recorded")
        return MetricsSeries(
            times=np.array([r["t"] for r in self._rows]),
            u_norm=np.array([r["u_norm"] for r in self._rows]),
            w_norm=np.array([r["w_norm"] for r in self._rows]),
            rho_norm=np.array([r["rho_norm"] for r in self._rows]),
            g_norm_sq=np.array([r["g_norm_sq"] for r in self._rows]),
            total_energy=np.array([r["total_energy"] for r in self._rows]),
            u_l4_total=np.array([r["u_l4_total"] for r in self._rows]),
            pair_d=np.array([r["pair_d"] for r in self._rows]),
        )


def asynchronous_degree_estimate(series: MetricsSeries, tail_fraction: float = 0.2) -> float:
    """Finite-horizon surrogate for the asynchronous degree.

    Sum over pairs of the maximum D_ij over the trailing tail_fraction of
    recorded times.  The true quantity takes a supremum over all initial
    data and a limsup in time, neither of which is computable; this
    estimate only bounds the observed run.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    n = len(series.times)
    n_tail = int(np.ceil(tail_fraction * n))
    if n_tail < 1:
        raise ValueError("tail window is empty")
    tail = series.pair_d[n - n_tail:]
    return float(tail.max(axis=0).sum())


@dataclass(frozen=True)
class DecayFit:
    window: tuple[float, float]
    rate: float
    r_squared: float
    n_samples: int


def fit_decay_rate(
    series: MetricsSeries,
    which: tuple[int, int] | str = "total",
    window: tuple[float, float] | None = None,
) -> DecayFit:
    """Least-squares exponential rate of a pairwise difference (or their sum).

    Fits log D against t over the window and returns the negated slope.
    ``which`` is a 0-based pair (i, j) or "total" for the sum over pairs.
    """
    if which == "total":
        values = series.total_pair_d()
    else:
        i, j = which
        try:
            col = series.pairs.index((i, j))
        except ValueError:
            raise ValueError(f"no pair ({i}, {j}) for m={series.m}") from None
        values = series.pair_d[:, col]

    t = series.times
    if window is None:
        window = (float(t[0]), float(t[-1]))
    t0, t1 = window
    if not t1 > t0:
        raise ValueError(f"window must have t1 > t0, got {window!r}")
    mask = (t >= t0) & (t <= t1)
    if mask.sum() < 10:
        raise ValueError(f"window {window!r} holds {int(mask.sum())} samples, need >= 10")
    tw = t[mask]
    vw = values[mask]
    nonpos = np.nonzero(vw <= 0)[0]
    if nonpos.size:
        raise ValueError(
            f"nonpositive value at t={tw[nonpos[0]]:g}; truncate the window before it"
        )

    logv = np.log(vw)
    slope, intercept = np.polyfit(tw, logv, 1)
    fitted = slope * tw + intercept
    ss_res = float(((logv - fitted) ** 2).sum())
    ss_tot = float(((logv - logv.mean()) ** 2).sum())
    r_sq = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(window=(float(t0), float(t1)), rate=float(-slope),
                    r_squared=r_sq, n_samples=int(mask.sum()))


@dataclass(frozen=True)
class AbsorbingReport:
    """Empirical absorbing-ball check: when the total energy enters
    {E <= K} and whether it stays there."""

    passed: bool
    bound: float
    entry_time: float | None
    entry_index: int | None
    excursion_time: float | None


def absorbing_check(series: MetricsSeries, K: float) -> AbsorbingReport:
    energy = series.total_energy
    inside = np.nonzero(energy <= K)[0]
    if inside.size == 0:
        return AbsorbingReport(False, K, None, None, None)
    first = int(inside[0])
    later_out = np.nonzero(energy[first:] > K)[0]
    if later_out.size:
        t_out = float(series.times[first + int(later_out[0])])
        return AbsorbingReport(False, K, float(series.times[first]), first, t_out)
    return AbsorbingReport(True, K, float(series.times[first]), first, None)


@dataclass(frozen=True)
class L4BoundReport:
    passed: bool
    bound: float
    tail_start_time: float
    max_tail_value: float
    violation_time: float | None


def l4_bound_check(series: MetricsSeries, Q: float, tail_fraction: float = 0.2) -> L4BoundReport:
    """Check the trailing part of sum_i ||u_i||_L4^4 against the bound 1 + Q."""
    bound = 1.0 + Q
    n = len(series.times)
    n_tail = max(1, int(np.ceil(tail_fraction * n)))
    tail_vals = series.u_l4_total[n - n_tail:]
    tail_times = series.times[n - n_tail:]
    bad = np.nonzero(tail_vals >= bound)[0]
    return L4BoundReport(
        passed=bad.size == 0,
        bound=bound,
        tail_start_time=float(tail_times[0]),
        max_tail_value=float(tail_vals.max()),
        violation_time=float(tail_times[int(bad[0])]) if bad.size else None,
    )


@dataclass(frozen=True)
class EnvelopeReport:
    """Worst ratio of D_ij(t) to the exponential envelope
    D_ij(t0) * exp(-alpha (t - t0)) over all pairs and recorded t > t0."""

    passed: bool
    alpha: float
    slack: float
    transient_time: float
    worst_margin: float
    worst_pair: tuple[int, int] | None
    worst_time: float | None


def sync_envelope_check(
    series: MetricsSeries,
    alpha: float,
    transient: float | None = None,
    slack: float = 1.5,
) -> EnvelopeReport:
    """Verify every pairwise difference obeys the rate-alpha decay envelope
    after the transient (default: 10% of the recorded span)."""
    t = series.times
    if transient is None:
        transient = float(t[0] + 0.1 * (t[-1] - t[0]))
    start = int(np.searchsorted(t, transient, side="left"))
    if start >= len(t) - 1:
        raise ValueError(f"transient {transient:g} leaves no samples to check")
    t0 = float(t[start])
    base = series.pair_d[start]

    worst = 0.0
    worst_pair = None
    worst_time = None
    envelope = np.exp(-alpha * (t[start + 1:] - t0))
    for col, pair in enumerate(series.pairs):
        d = series.pair_d[start + 1:, col]
        if base[col] == 0.0:
            # fully synchronized baseline: any later nonzero is a violation
            ratios = np.where(d == 0.0, 0.0, np.inf)
        else:
            ratios = d / (base[col] * envelope)
        idx = int(np.argmax(ratios))
        if ratios[idx] > worst:
            worst = float(ratios[idx])
            worst_pair = pair
            worst_time = float(t[start + 1 + idx])
    return EnvelopeReport(
        passed=worst <= slack,
        alpha=alpha,
        slack=slack,
        transient_time=t0,
        worst_margin=worst,
        worst_pair=worst_pair,
        worst_time=worst_time,
    )
