"""Tiny dependency-free SVG line charts for curve artifacts.

Figures written here are meant to be read, not interacted with: axes, tick
labels, one polyline per series, a text legend.  All coordinates are
formatted with fixed precision so identical data produces identical bytes.
"""

from __future__ import annotations

import math

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 16, 28, 44


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5):
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart_svg(xs, series, labels, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Render one chart; series is a list of y-vectors over the shared xs."""
    xs = [float(x) for x in xs]
    series = [[float(y) for y in ys] for ys in series]
    finite = [y for ys in series for y in ys if math.isfinite(y)]
    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(finite) if finite else 0.0
    y_hi = max(finite) if finite else 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="16" text-anchor="middle" font-size="13">{title}</text>',
    ]
    axis = f'stroke="black" stroke-width="1"'
    parts.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" {axis}/>')
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" {axis}/>')
    for tx in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{_fmt(px(tx))}" y1="{_H - _MB}" x2="{_fmt(px(tx))}" y2="{_H - _MB + 4}" {axis}/>'
        )
        parts.append(
            f'<text x="{_fmt(px(tx))}" y="{_H - _MB + 16}" text-anchor="middle">{tx:.4g}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{_ML - 4}" y1="{_fmt(py(ty))}" x2="{_ML}" y2="{_fmt(py(ty))}" {axis}/>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{_fmt(py(ty) + 3)}" text-anchor="end">{ty:.4g}</text>'
        )
    parts.append(
        f'<text x="{(_ML + _W - _MR) // 2}" y="{_H - 8}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="14" y="{(_MT + _H - _MB) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(_MT + _H - _MB) // 2})">{ylabel}</text>'
    )
    for k, ys in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(
            f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys) if math.isfinite(y)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        label = labels[k] if k < len(labels) else f"series {k}"
        ly = _MT + 14 * (k + 1)
        parts.append(f'<line x1="{_W - 150}" y1="{ly - 4}" x2="{_W - 130}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_W - 125}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
