"""Minimal deterministic SVG line plots.

Output depends only on the data: no timestamps, ids or random hashes, so
regenerated figures can be diffed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#34495e")
DASHES = ("2,3", "8,4", "", "8,3,2,3", "4,2", "1,1")


@dataclass
class Curve:
    x: Sequence[float]
    y: Sequence[float]
    label: str = ""


@dataclass
class Panel:
    curves: list
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""


@dataclass
class PlotStyle:
    width: int = 640
    panel_height: int = 320
    margin_left: int = 80
    margin_right: int = 20
    margin_top: int = 30
    margin_bottom: int = 50
    colors: tuple = COLORS
    dashes: tuple = DASHES
    stroke_width: float = 1.5
    font_size: int = 12
    n_ticks: int = 5
    extra: dict = field(default_factory=dict)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if 1e-3 <= abs(v) < 1e4:
        return f"{v:.4g}"
    return f"{v:.2e}"


def _nice_ticks(lo: float, hi: float, n: int):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v / step) * step)
        v += step
    return ticks


def _check(curves) -> None:
    if not curves:
        raise ValueError("empty series: a panel needs at least one curve")
    for c in curves:
        x = np.asarray(c.x, dtype=float)
        y = np.asarray(c.y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise ValueError(f"curve {c.label!r} is empty or has mismatched x/y")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError(f"curve {c.label!r} contains NaN or infinite values")


def emit_plot(panels: Union[Panel, Sequence[Panel]], style: PlotStyle | None = None) -> str:
    """Render one or more vertically stacked panels to an SVG document string."""
    style = style or PlotStyle()
    if isinstance(panels, Panel):
        panels = [panels]
    if not panels:
        raise ValueError("empty series: nothing to plot")
    for p in panels:
        _check(p.curves)

    ph = style.panel_height
    height = ph * len(panels)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{height}" '
        f'viewBox="0 0 {style.width} {height}" font-family="sans-serif" font-size="{style.font_size}">',
        f'<rect x="0" y="0" width="{style.width}" height="{height}" fill="white"/>',
    ]
    for k, panel in enumerate(panels):
        out.extend(_panel(panel, k * ph, style))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _panel(panel: Panel, y0: float, s: PlotStyle):
    x_lo = min(float(np.min(c.x)) for c in panel.curves)
    x_hi = max(float(np.max(c.x)) for c in panel.curves)
    y_lo = min(float(np.min(c.y)) for c in panel.curves)
    y_hi = max(float(np.max(c.y)) for c in panel.curves)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        pad = abs(y_hi) * 0.05 or 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left = s.margin_left
    right = s.width - s.margin_right
    top = y0 + s.margin_top
    bottom = y0 + s.panel_height - s.margin_bottom

    def sx(v):
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left)

    def sy(v):
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top)

    g = [f'<g class="panel">',
         f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" '
         f'height="{_fmt(bottom - top)}" fill="none" stroke="black"/>']
    for tv in _nice_ticks(x_lo, x_hi, s.n_ticks):
        X = sx(tv)
        g.append(f'<line x1="{_fmt(X)}" y1="{_fmt(bottom)}" x2="{_fmt(X)}" y2="{_fmt(bottom + 5)}" stroke="black"/>')
        g.append(f'<text x="{_fmt(X)}" y="{_fmt(bottom + 18)}" text-anchor="middle">{escape(_tick_label(tv))}</text>')
    for tv in _nice_ticks(y_lo, y_hi, s.n_ticks):
        Y = sy(tv)
        g.append(f'<line x1="{_fmt(left - 5)}" y1="{_fmt(Y)}" x2="{_fmt(left)}" y2="{_fmt(Y)}" stroke="black"/>')
        g.append(f'<text x="{_fmt(left - 8)}" y="{_fmt(Y + 4)}" text-anchor="end">{escape(_tick_label(tv))}</text>')
    if panel.title:
        g.append(f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(y0 + 18)}" text-anchor="middle">{escape(panel.title)}</text>')
    if panel.xlabel:
        g.append(f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(bottom + 38)}" text-anchor="middle">{escape(panel.xlabel)}</text>')
    if panel.ylabel:
        cy = (top + bottom) / 2
        g.append(f'<text x="{_fmt(16)}" y="{_fmt(cy)}" text-anchor="middle" '
                 f'transform="rotate(-90 {_fmt(16)} {_fmt(cy)})">{escape(panel.ylabel)}</text>')
    for i, c in enumerate(panel.curves):
        color = s.colors[i % len(s.colors)]
        dash = s.dashes[i % len(s.dashes)]
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(np.asarray(c.x, float), np.asarray(c.y, float)))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        g.append(f'<polyline fill="none" stroke="{color}" stroke-width="{s.stroke_width}"{dash_attr} points="{pts}"/>')
        if c.label:
            ly = top + 14 + 16 * i
            g.append(f'<line x1="{_fmt(right - 150)}" y1="{_fmt(ly - 4)}" x2="{_fmt(right - 120)}" y2="{_fmt(ly - 4)}" '
                     f'stroke="{color}" stroke-width="{s.stroke_width}"{dash_attr}/>')
            g.append(f'<text x="{_fmt(right - 114)}" y="{_fmt(ly)}">{escape(c.label)}</text>')
    g.append("</g>")
    return g
