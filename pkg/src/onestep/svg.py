"""Minimal deterministic SVG charts: line plots and a triangular heatmap.

Output depends only on the inputs (fixed number formatting, no timestamps or
random ids), so repeated runs give byte-identical files.  Every plotted series
is wrapped in ``<g class="series">``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 80, "right": 30, "top": 60, "bottom": 70}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
MAX_HEAT_CELLS = 101


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: str = ""
    dashed: bool = False
    marker: bool = False
    color: Optional[str] = None


@dataclass
class Heatmap:
    """Scattered values on a regular lattice, drawn as square cells."""

    x: Sequence[float]
    y: Sequence[float]
    value: Sequence[float]
    label: str = ""
    overlays: list = field(default_factory=list)


def _f(v: float) -> str:
    return f"{v:.2f}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("axis limits must be finite")
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(k * mag for k in (1, 2, 2.5, 5, 10) if k * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12) + 0.0)
        t += step
    return ticks


def _label(v: float) -> str:
    return f"{v:.6g}"


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _limits(values, pad: float = 0.05):
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        raise DomainError("nothing finite to plot")
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        d = abs(lo) * 0.1 or 1.0
        return lo - d, hi + d
    d = (hi - lo) * pad
    return lo - d, hi + d


def _axes(fr: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    out = [
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{fr.left}" y1="{fr.bottom}" x2="{fr.right}" y2="{fr.bottom}"/>'
        f'<line x1="{fr.left}" y1="{fr.top}" x2="{fr.left}" y2="{fr.bottom}"/></g>',
    ]
    ticks = ['<g class="ticks" font-family="sans-serif" font-size="12">']
    for t in nice_ticks(fr.x0, fr.x1):
        x = _f(fr.px(t))
        ticks.append(f'<line x1="{x}" y1="{fr.bottom}" x2="{x}" y2="{fr.bottom + 5}" stroke="black"/>')
        ticks.append(f'<text x="{x}" y="{fr.bottom + 20}" text-anchor="middle">{_label(t)}</text>')
    for t in nice_ticks(fr.y0, fr.y1):
        y = _f(fr.py(t))
        ticks.append(f'<line x1="{fr.left - 5}" y1="{y}" x2="{fr.left}" y2="{y}" stroke="black"/>')
        ticks.append(f'<text x="{fr.left - 8}" y="{y}" text-anchor="end" dominant-baseline="middle">{_label(t)}</text>')
    ticks.append("</g>")
    out.extend(ticks)
    mid_x = (fr.left + fr.right) / 2
    mid_y = (fr.top + fr.bottom) / 2
    out.append(f'<text x="{_f(mid_x)}" y="30" text-anchor="middle" font-family="sans-serif" '
               f'font-size="16">{escape(title)}</text>')
    out.append(f'<text x="{_f(mid_x)}" y="{HEIGHT - 20}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{_f(mid_y)}" text-anchor="middle" font-family="sans-serif" font-size="14" '
               f'transform="rotate(-90 20 {_f(mid_y)})">{escape(ylabel)}</text>')
    return out


def _series_svg(fr: _Frame, s: Series, color: str) -> str:
    x = np.asarray(s.x, dtype=float)
    y = np.asarray(s.y, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise DomainError(f"series {s.label!r} is empty or has mismatched x/y")
    parts = [f'<g class="series" data-label="{escape(s.label, {chr(34): "&quot;"})}">']
    if s.marker:
        for xi, yi in zip(x, y):
            parts.append(f'<circle cx="{_f(fr.px(xi))}" cy="{_f(fr.py(yi))}" r="5" fill="{color}"/>')
    else:
        pts = " ".join(f"{_f(fr.px(xi))},{_f(fr.py(yi))}" for xi, yi in zip(x, y))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
    parts.append("</g>")
    return "".join(parts)


def _legend(series: Sequence[Series], colors: list[str]) -> list[str]:
    out = ['<g class="legend" font-family="sans-serif" font-size="12">']
    x = WIDTH - MARGIN["right"] - 200
    for i, (s, c) in enumerate(zip(series, colors)):
        if not s.label:
            continue
        y = MARGIN["top"] + 10 + 18 * i
        out.append(f'<rect x="{x}" y="{y - 8}" width="14" height="4" fill="{c}"/>')
        out.append(f'<text x="{x + 20}" y="{y}" dominant-baseline="middle">{escape(s.label)}</text>')
    out.append("</g>")
    return out


def _wrap(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def line_chart(series: Sequence[Series], title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    if not series:
        raise DomainError("no series to plot")
    xs = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s.y, dtype=float) for s in series])
    if xs.size == 0:
        raise DomainError("all series are empty")
    fr = _Frame(_limits(xs, 0.02), _limits(ys))
    colors = [s.color or PALETTE[i % len(PALETTE)] for i, s in enumerate(series)]
    body = _axes(fr, title, xlabel, ylabel)
    body.extend(_series_svg(fr, s, c) for s, c in zip(series, colors))
    body.extend(_legend(series, colors))
    return _wrap(body)


def _ramp(t: float) -> str:
    # white -> dark blue
    t = min(max(t, 0.0), 1.0)
    r = round(247 - t * (247 - 8))
    g = round(251 - t * (251 - 48))
    b = round(255 - t * (255 - 107))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_chart(hm: Heatmap, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    x = np.asarray(hm.x, dtype=float)
    y = np.asarray(hm.y, dtype=float)
    v = np.asarray(hm.value, dtype=float)
    if x.size == 0 or not (x.shape == y.shape == v.shape):
        raise DomainError("heatmap needs equal-length, non-empty x, y and value")
    ux = np.unique(x)
    stride = max(1, math.ceil((ux.size - 1) / (MAX_HEAT_CELLS - 1)))
    keep_x = set(ux[::stride].tolist())
    uy = np.unique(y)
    keep_y = set(uy[::stride].tolist())
    cell = (ux[1] - ux[0]) * stride if ux.size > 1 else 1.0
    fr = _Frame((0.0, max(1.0, float(x.max()))), (0.0, max(1.0, float(y.max()))))
    vlo, vhi = float(v.min()), float(v.max())
    span = vhi - vlo or 1.0
    body = _axes(fr, title, xlabel, ylabel)
    cells = ['<g class="series" data-label="%s">' % escape(hm.label)]
    w = abs(fr.px(cell) - fr.px(0.0))
    hgt = abs(fr.py(0.0) - fr.py(cell))
    for xi, yi, vi in zip(x, y, v):
        if xi not in keep_x or yi not in keep_y:
            continue
        cells.append(f'<rect x="{_f(fr.px(xi) - w / 2)}" y="{_f(fr.py(yi) - hgt / 2)}" width="{_f(w)}" '
                     f'height="{_f(hgt)}" fill="{_ramp((vi - vlo) / span)}"/>')
    cells.append("</g>")
    body.extend(cells)
    colors = [s.color or PALETTE[(i + 1) % len(PALETTE)] for i, s in enumerate(hm.overlays)]
    body.extend(_series_svg(fr, s, c) for s, c in zip(hm.overlays, colors))
    body.append(f'<text x="{MARGIN["left"] + 10}" y="{MARGIN["top"] + 10}" font-family="sans-serif" '
                f'font-size="12">range {_label(vlo)} to {_label(vhi)}</text>')
    return _wrap(body)


def svg_render(data, kind: str = "line", path=None, **labels) -> str:
    """Render ``data`` (a list of :class:`Series` or a :class:`Heatmap`) and optionally write it."""
    if kind == "line":
        text = line_chart(data, **labels)
    elif kind == "heatmap":
        text = heatmap_chart(data, **labels)
    else:
        raise DomainError(f"unknown chart kind {kind!r}")
    if path is not None:
        from .io import write_atomic

        write_atomic(path, text)
    return text
