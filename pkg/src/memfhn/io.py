"""On-disk formats: the metrics CSV and the raw field snapshot.

CSV: header then one row per recorded time; columns
t, u_norm_1..m, w_norm_1..m, rho_norm_1..m, g_norm_sq_1..m, total_energy,
u_l4_total, D_i_j for all i < j (1-based labels, lexicographic).  Numbers
are written with 17 significant digits so a reparse recovers every float64
bit-exactly, and rewriting the same series is byte-identical.

Snapshot: one JSON header line (m, nx, ny, dx, t, field order, dtype,
byte order) followed by the raw little-endian float64 payload
u_1..u_m, w_1..w_m, rho_1..rho_m in row-major order.  Round-trips
losslessly; a payload that disagrees with its header fails to load.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import Grid2D
from .metrics import MetricsSeries
from .model import NetworkState

__all__ = [
    "SnapshotFormatError",
    "write_metrics_csv",
    "read_metrics_csv",
    "write_snapshot",
    "read_snapshot",
]

_SNAPSHOT_MAGIC = "MEMFHN-SNAPSHOT-1"


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_metrics_csv(series: MetricsSeries, path: str | Path) -> None:
    """Write the series; deterministic bytes, LF line endings."""
    lines = [",".join(series.column_names())]
    for i in range(len(series.times)):
        lines.append(",".join(_fmt(v) for v in series.row(i)))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_metrics_csv(path: str | Path) -> MetricsSeries:
    """Reparse a metrics CSV back into a series (full float64 precision)."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.split("\n") if ln]
    if len(lines) < 2:
        raise ValueError(f"{path}: need a header and at least one data row")
    header = lines[0].split(",")
    m = sum(1 for name in header if name.startswith("u_norm_"))
    if m == 0:
        raise ValueError(f"{path}: no u_norm_* columns in header")
    n_pairs = m * (m - 1) // 2
    expected = 1 + 4 * m + 2 + n_pairs
    if len(header) != expected:
        raise ValueError(
            f"{path}: {len(header)} columns, expected {expected} for m={m}"
        )
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.shape[1] != expected:
        raise ValueError(f"{path}: data rows do not match the header width")
    c = 1
    u_norm = data[:, c:c + m]; c += m
    w_norm = data[:, c:c + m]; c += m
    rho_norm = data[:, c:c + m]; c += m
    g_norm_sq = data[:, c:c + m]; c += m
    total_energy = data[:, c]; c += 1
    u_l4_total = data[:, c]; c += 1
    pair_d = data[:, c:]
    return MetricsSeries(
        times=data[:, 0],
        u_norm=u_norm,
        w_norm=w_norm,
        rho_norm=rho_norm,
        g_norm_sq=g_norm_sq,
        total_energy=total_energy,
        u_l4_total=u_l4_total,
        pair_d=pair_d,
    )


class SnapshotFormatError(ValueError):
    pass


def write_snapshot(state: NetworkState, path: str | Path) -> None:
    """Self-describing binary dump of all fields at one time."""
    header = {
        "magic": _SNAPSHOT_MAGIC,
        "m": state.m,
        "nx": state.grid.nx,
        "ny": state.grid.ny,
        "dx": state.grid.dx,
        "t": state.t,
        "fields": ["u", "w", "rho"],
        "dtype": "float64",
        "byte_order": "little",
    }
    payload = np.concatenate([
        np.ascontiguousarray(state.u, dtype="<f8").reshape(-1),
        np.ascontiguousarray(state.w, dtype="<f8").reshape(-1),
        np.ascontiguousarray(state.rho, dtype="<f8").reshape(-1),
    ])
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("ascii") + b"\n")
        fh.write(payload.tobytes())


def read_snapshot(path: str | Path) -> NetworkState:
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise SnapshotFormatError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:nl].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotFormatError(f"{path}: bad header: {exc}") from None
    if not isinstance(header, dict) or header.get("magic") != _SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: not a {_SNAPSHOT_MAGIC} file")
    try:
        m, nx, ny = int(header["m"]), int(header["nx"]), int(header["ny"])
        dx, t = float(header["dx"]), float(header["t"])
        fields = header["fields"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"{path}: incomplete header: {exc}") from None
    if fields != ["u", "w", "rho"]:
        raise SnapshotFormatError(f"{path}: unexpected field order {fields!r}")
    payload = raw[nl + 1:]
    expected = 3 * m * nx * ny * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    per = m * nx * ny
    grid = Grid2D(nx=nx, ny=ny, dx=dx)
    return NetworkState(
        grid=grid,
        u=flat[:per].reshape(m, nx, ny).copy(),
        w=flat[per:2 * per].reshape(m, nx, ny).copy(),
        rho=flat[2 * per:].reshape(m, nx, ny).copy(),
        t=t,
    )
