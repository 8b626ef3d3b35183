"""Minimal deterministic SVG 1.1 line charts for metric series.

One polyline per selected column, linear or log y-axis, labeled axes and a
legend.  The output is plain generated text with no timestamps or random
identifiers, so a fixed input always produces byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .metrics import MetricsSeries

__all__ = ["render_plot_svg"]

_WIDTH, _HEIGHT = 880, 520
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 710, 40, 465

_PALETTE = [
    "#1f6fb2", "#d1495b", "#2e8b57", "#8a5fbf",
    "#e08e29", "#3bb2b8", "#975a2e", "#5b5b5b",
]


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            return mult * mag
    return 10.0 * mag


def _linear_ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        return [lo]
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks or [lo, hi]


def _log_ticks(lo: float, hi: float) -> list[float]:
    k0, k1 = math.ceil(math.log10(lo) - 1e-12), math.floor(math.log10(hi) + 1e-12)
    decades = [10.0 ** k for k in range(k0, k1 + 1)]
    if len(decades) >= 2:
        return decades
    # span under a decade: four geometrically spaced ticks
    return list(np.geomspace(lo, hi, 4))


def _fmt_tick(v: float) -> str:
    return format(v, ".4g")


def render_plot_svg(
    series: MetricsSeries,
    selection: list[str],
    path: str | Path,
    log_y: bool = False,
    title: str = "",
    y_label: str = "value",
) -> None:
    """Render the named columns of the series against time."""
    if not selection:
        raise ValueError("empty column selection")
    names = series.column_names()
    for name in selection:
        if name not in names:
            raise ValueError(f"unknown column {name!r}")

    t = series.times
    columns = {name: series.column(name) for name in selection}

    t_lo, t_hi = float(t[0]), float(t[-1])
    if t_hi == t_lo:
        t_lo, t_hi = t_lo - 0.5, t_hi + 0.5

    if log_y:
        positive = [c[c > 0] for c in columns.values()]
        flat = np.concatenate([p for p in positive if p.size])
        if flat.size == 0:
            raise ValueError("log-y plot needs at least one positive value")
        y_lo, y_hi = float(flat.min()), float(flat.max())
        if y_hi == y_lo:
            y_lo, y_hi = y_lo / 2.0, y_hi * 2.0
        ticks = _log_ticks(y_lo, y_hi)
        ylo_, yhi_ = math.log10(y_lo), math.log10(y_hi)

        def y_px(v: float) -> float:
            frac = (math.log10(v) - ylo_) / (yhi_ - ylo_)
            return _BOTTOM - frac * (_BOTTOM - _TOP)
    else:
        allv = np.concatenate(list(columns.values()))
        y_lo, y_hi = float(allv.min()), float(allv.max())
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad
        ticks = _linear_ticks(y_lo, y_hi)

        def y_px(v: float) -> float:
            frac = (v - y_lo) / (y_hi - y_lo)
            return _BOTTOM - frac * (_BOTTOM - _TOP)

    def x_px(v: float) -> float:
        return _LEFT + (v - t_lo) / (t_hi - t_lo) * (_RIGHT - _LEFT)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>')
    if title:
        out.append(
            f'<text x="{(_LEFT + _RIGHT) // 2}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="15">{title}</text>'
        )

    # frame
    out.append(
        f'<rect x="{_LEFT}" y="{_TOP}" width="{_RIGHT - _LEFT}" '
        f'height="{_BOTTOM - _TOP}" fill="none" stroke="#222222"/>'
    )
    # y ticks
    for v in ticks:
        py = y_px(v)
        if py < _TOP - 0.5 or py > _BOTTOM + 0.5:
            continue
        out.append(
            f'<line x1="{_LEFT - 5}" y1="{py:.2f}" x2="{_LEFT}" y2="{py:.2f}" '
            f'stroke="#222222"/>'
        )
        out.append(
            f'<text x="{_LEFT - 9}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="monospace" font-size="12">{_fmt_tick(v)}</text>'
        )
    # x ticks
    for v in _linear_ticks(t_lo, t_hi):
        px = x_px(v)
        if px < _LEFT - 0.5 or px > _RIGHT + 0.5:
            continue
        out.append(
            f'<line x1="{px:.2f}" y1="{_BOTTOM}" x2="{px:.2f}" y2="{_BOTTOM + 5}" '
            f'stroke="#222222"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{_BOTTOM + 20}" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{_fmt_tick(v)}</text>'
        )
    # axis labels
    out.append(
        f'<text x="{(_LEFT + _RIGHT) // 2}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="monospace" font-size="13">t</text>'
    )
    label = f"{y_label} (log scale)" if log_y else y_label
    out.append(
        f'<text x="18" y="{(_TOP + _BOTTOM) // 2}" text-anchor="middle" '
        f'font-family="monospace" font-size="13" '
        f'transform="rotate(-90 18 {(_TOP + _BOTTOM) // 2})">{label}</text>'
    )

    # curves
    for idx, name in enumerate(selection):
        color = _PALETTE[idx % len(_PALETTE)]
        values = columns[name]
        pts = []
        for tv, v in zip(t, values):
            if log_y and v <= 0:
                continue
            pts.append(f"{x_px(float(tv)):.2f},{y_px(float(v)):.2f}")
        if pts:
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{" ".join(pts)}"/>'
            )
        ly = _TOP + 10 + 18 * idx
        out.append(
            f'<rect x="{_RIGHT + 14}" y="{ly - 9}" width="14" height="4" fill="{color}"/>'
        )
        out.append(
            f'<text x="{_RIGHT + 34}" y="{ly}" font-family="monospace" '
            f'font-size="12">{name}</text>'
        )

    out.append("</svg>")
    Path(path).write_bytes(("\n".join(out) + "\n").encode("ascii"))
