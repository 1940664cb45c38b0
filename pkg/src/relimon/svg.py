"""Deterministic SVG rendering of a mean value chart."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .spc import ABOVE_UCL, BELOW_LCL, MeanValueChart

WIDTH = 800
HEIGHT = 480
MARGIN_LEFT = 80
MARGIN_RIGHT = 60
MARGIN_TOP = 40
MARGIN_BOTTOM = 60

STATUS_COLORS = {BELOW_LCL: "#c0392b", ABOVE_UCL: "#27ae60"}
POINT_COLOR = "#1f4e79"


def _f(x: float) -> str:
    return f"{x:.2f}"


def _fmt_tick(v: float) -> str:
    return f"{v:.4g}"


class _Axis:
    def __init__(self, lo: float, hi: float, pix_lo: float, pix_hi: float, log: bool):
        self.log = log
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v: float) -> float:
        if self.log:
            v = math.log10(v) if v > 0 else self.lo
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self) -> list[float]:
        if self.log:
            return [10.0 ** k for k in range(math.ceil(self.lo), math.floor(self.hi) + 1)]
        step = (self.hi - self.lo) / 5
        return [self.lo + i * step for i in range(6)]


def _y_range(values: list[float], log: bool) -> tuple[float, float]:
    if log:
        positive = [v for v in values if v > 0]
        lo, hi = min(positive), max(positive)
        return lo / 2, hi * 2
    lo, hi = min(0.0, min(values)), max(values)
    return lo, hi * 1.05 if hi > 0 else 1.0


def render_chart_svg(chart: MeanValueChart, log_y: bool = True, title: str | None = None) -> str:
    """SVG with one mark per chart point and three labeled horizontal limit lines.

    Zero differences on a log axis are drawn on the bottom edge.
    """
    lim = chart.limits
    diffs = [p.diff for p in chart.points]
    levels = [("LCL", lim.m_low), ("CL", lim.m_center), ("UCL", lim.m_high)]
    y_lo, y_hi = _y_range(diffs + [v for _, v in levels], log_y)

    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    n = len(chart.points)
    xaxis = _Axis(0.5, n + 0.5, x0, x1, log=False)
    yaxis = _Axis(y_lo, y_hi, y0, y1, log=log_y)

    if title is None:
        title = f"Mean value chart (order {chart.model.order_r}, {chart.m_scale} scale)"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>',
        f'<g class="y-axis" data-scale="{"log" if log_y else "linear"}">',
    ]
    for v in yaxis.ticks():
        y = _f(yaxis(v))
        out.append(f'<line x1="{x0 - 4}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>'
                   f'<text x="{x0 - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">{_fmt_tick(v)}</text>')
    out.append("</g>")

    out.append('<g class="x-axis">')
    step = max(1, math.ceil(n / 20))
    for i in range(1, n + 1, step):
        x = _f(xaxis(i))
        out.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + 4}" stroke="black"/>'
                   f'<text x="{x}" y="{y0 + 16}" text-anchor="middle">{i}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">failure group</text>')
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.0f})">successive difference of m(t)</text>')
    out.append("</g>")

    out.append('<g class="limits" stroke-dasharray="6 4" stroke-width="1.2">')
    for label, value in levels:
        y = _f(yaxis(value))
        out.append(f'<line class="limit" data-label="{label}" x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#555555"/>'
                   f'<text x="{x1 + 4}" y="{y}" dominant-baseline="middle" stroke="none">{label}</text>')
    out.append("</g>")

    coords = [(xaxis(p.index), yaxis(p.diff)) for p in chart.points]
    path = " ".join(f"{_f(x)},{_f(y)}" for x, y in coords)
    out.append(f'<polyline points="{path}" fill="none" stroke="{POINT_COLOR}" stroke-width="1"/>')
    out.append('<g class="points">')
    for p, (x, y) in zip(chart.points, coords):
        color = STATUS_COLORS.get(p.status, POINT_COLOR)
        out.append(f'<circle class="point" data-index="{p.index}" data-status="{p.status}" '
                   f'cx="{_f(x)}" cy="{_f(y)}" r="3" fill="{color}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
