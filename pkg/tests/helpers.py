"""Shared builders for the test suite."""

import numpy as np

from memfhn.metrics import MetricsSeries, pair_indices
from memfhn.model import NetworkParams


def params_with(m=4, **overrides):
    """The published parameter set (constants' k) with selective overrides."""
    base = dict(eta=10.0, sigma=0.01, J=0.5, k=0.25, a=0.35, b=0.35, c=0.7,
                q=0.35, r=10.0, P=1.45, m=m)
    base.update(overrides)
    return NetworkParams(**base)


def make_series(times, pair_columns, m=2, u_norm=None, u_l4=None, total_energy=None):
    """MetricsSeries with prescribed pairwise-difference columns."""
    times = np.asarray(times, dtype=float)
    n = len(times)
    n_pairs = len(pair_indices(m))
    pair_d = np.column_stack([np.asarray(c, dtype=float) for c in pair_columns])
    assert pair_d.shape == (n, n_pairs)
    u_norm = np.ones((n, m)) if u_norm is None else np.asarray(u_norm, dtype=float)
    g = u_norm * u_norm + 2.0
    return MetricsSeries(
        times=times,
        u_norm=u_norm,
        w_norm=np.ones((n, m)),
        rho_norm=np.ones((n, m)),
        g_norm_sq=g,
        total_energy=g.sum(axis=1) if total_energy is None
        else np.asarray(total_energy, dtype=float),
        u_l4_total=np.ones(n) if u_l4 is None else np.asarray(u_l4, dtype=float),
        pair_d=pair_d,
    )
