"""Tiny self-contained SVG line/step charts with a fixed layout.

Coordinates are printed with a fixed number of decimals so identical data
always yields identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]
    style: str = "line"  # "line", "dashed", "step", "points"
    color: str | None = None


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    logx: bool = False
    logy: bool = False
    series: list[Series] = field(default_factory=list)

    def add(self, *args, **kwargs) -> Chart:
        self.series.append(Series(*args, **kwargs))
        return self

    def render(self) -> str:
        return render(self)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(round(t / step) * step)
        t += step
    return ticks


def render(chart: Chart) -> str:
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom

    def tx(v):
        return math.log10(v) if chart.logx else v

    def ty(v):
        return math.log10(v) if chart.logy else v

    pts = [
        (tx(x), ty(y))
        for s in chart.series
        for x, y in zip(s.x, s.y)
        if math.isfinite(x) and math.isfinite(y) and (not chart.logx or x > 0) and (not chart.logy or y > 0)
    ]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(chart.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for axis, lo, hi, log in (("x", x0, x1, chart.logx), ("y", y0, y1, chart.logy)):
        if log:
            ticks = [float(t) for t in range(math.ceil(lo), math.floor(hi) + 1)] or [lo, hi]
        else:
            ticks = _nice_ticks(lo, hi)
        for t in ticks:
            label = escape(_tick_label(10**t if log else t))
            if axis == "x":
                px = _fmt(sx(t))
                out.append(f'<line x1="{px}" y1="{top + ph}" x2="{px}" y2="{top + ph + 4}" stroke="black"/>')
                out.append(f'<text x="{px}" y="{top + ph + 16}" text-anchor="middle">{label}</text>')
            else:
                py = _fmt(sy(t))
                out.append(f'<line x1="{left - 4}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/>')
                out.append(f'<text x="{left - 6}" y="{py}" text-anchor="end" dominant-baseline="middle">{label}</text>')
    out.append(
        f'<text x="{left + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(chart.xlabel)}</text>'
    )
    out.append(
        f'<text x="14" y="{top + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.0f})">{escape(chart.ylabel)}</text>'
    )

    legend_y = top + 14
    for i, s in enumerate(chart.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        xy = [
            (sx(tx(x)), sy(ty(y)))
            for x, y in zip(s.x, s.y)
            if math.isfinite(x) and math.isfinite(y) and (not chart.logx or x > 0) and (not chart.logy or y > 0)
        ]
        if s.style == "points":
            out.extend(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3" fill="{color}"/>' for a, b in xy)
        else:
            if s.style == "step" and len(xy) > 1:
                half = (xy[1][0] - xy[0][0]) / 2
                stepped = []
                for a, b in xy:
                    stepped += [(a - half, b), (a + half, b)]
                xy = stepped
            path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in xy)
            dash = ' stroke-dasharray="4 3"' if s.style == "dashed" else ""
            width = "2" if s.style == "step" else "1"
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>')
        if s.label:
            out.append(
                f'<rect x="{left + pw - 150}" y="{legend_y - 8}" width="10" height="10" fill="{color}"/>'
                f'<text x="{left + pw - 135}" y="{legend_y}">{escape(s.label)}</text>'
            )
            legend_y += 14
    out.append("</svg>")
    return "\n".join(out) + "\n"
