"""Minimal SVG line and scatter charts. CSV files remain the source of truth."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 55


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-12 * abs(hi):
        out.append(round(v, 12))
        v += step
    return out


def render(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
           logx: bool = False, scatter: bool = False, provenance: str = "",
           diagonal: bool = False) -> str:
    """SVG text for ``{label: (xs, ys)}``; NaN points are skipped."""
    pts = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys)
           if y is not None and not math.isnan(y)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    tx = (lambda x: math.log10(x)) if logx else (lambda x: x)
    xs = [tx(p[0]) for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if diagonal:
        x0 = y0 = min(x0, y0)
        x1 = y1 = max(x1, y1)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (tx(x) - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + (1 - (y - y0) / (y1 - y0)) * ph

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f"<!-- {escape(provenance).replace('--', '- -')} -->" if provenance else "",
           f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{LEFT + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(y0, y1):
        y = sy(t)
        out.append(f'<line x1="{LEFT - 4}" y1="{y:.1f}" x2="{LEFT}" y2="{y:.1f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.1f}" text-anchor="end">{t:g}</text>')
    xt = _ticks(x0, x1)
    for t in xt:
        x = LEFT + (t - x0) / (x1 - x0) * pw
        lab = f"{10 ** t:g}" if logx else f"{t:g}"
        out.append(f'<line x1="{x:.1f}" y1="{TOP + ph}" x2="{x:.1f}" y2="{TOP + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{TOP + ph + 16}" text-anchor="middle">{lab}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>')
    if diagonal:
        out.append(f'<line x1="{sx(x0):.1f}" y1="{sy(x0):.1f}" x2="{sx(x1):.1f}" '
                   f'y2="{sy(x1):.1f}" stroke="#999" stroke-dasharray="4 3"/>')
    for k, (label, (xs_, ys_)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts_ = [(sx(x), sy(y)) for x, y in zip(xs_, ys_)
                if y is not None and not math.isnan(y)]
        if not scatter and len(pts_) > 1:
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts_)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts_:
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="{color}"/>')
        ly = TOP + 14 + 16 * k
        out.append(f'<rect x="{W - RIGHT + 12}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{W - RIGHT + 26}" y="{ly + 1}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(line for line in out if line) + "\n"
