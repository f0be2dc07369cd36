"""Minimal SVG line charts of sweep records: one polyline per frame against sigma."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=60)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
LABELS = {
    "f_av": "average fidelity",
    "gamma_av": "average purity",
    "c_av": "average concurrence",
}
CONCURRENCE_THRESHOLD = 1.0 / math.sqrt(2.0)


def _pi_label(x: float) -> str:
    if x == 0:
        return "0"
    for den in (1, 2, 3, 4, 6, 9, 12, 18, 36):
        num = x * den / math.pi
        if abs(num - round(num)) < 1e-9:
            n = int(round(num))
            top = "π" if n == 1 else f"{n}π"
            return top if den == 1 else f"{top}/{den}"
    return f"{x:.3g}"


def render_svg(records, metric: str, comments=()) -> str:
    if metric not in LABELS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(LABELS)}")
    series: dict[str, list] = {}
    for r in records:
        series.setdefault(r.frame, []).append((r.sigma, getattr(r, metric)))
    sigmas = sorted({r.sigma for r in records})
    if len(sigmas) < 2:
        raise ValueError("a plot needs at least 2 sigma points")

    x0, x1 = sigmas[0], sigmas[-1]
    y0, y1 = (0.25 if metric == "gamma_av" else 0.0), 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + pw * (x - x0) / (x1 - x0)

    def sy(y):
        return MARGIN["top"] + ph * (1.0 - (y - y0) / (y1 - y0))

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out += [f"<!-- {escape(c)} -->" for c in comments]
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    # axes
    out.append(
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{sx(x0):.2f}" y1="{sy(y0):.2f}" x2="{sx(x1):.2f}" y2="{sy(y0):.2f}"/>'
        f'<line x1="{sx(x0):.2f}" y1="{sy(y0):.2f}" x2="{sx(x0):.2f}" y2="{sy(y1):.2f}"/></g>'
    )
    for s in sigmas:
        out.append(
            f'<text x="{sx(s):.2f}" y="{sy(y0) + 18:.2f}" text-anchor="middle">{_pi_label(s)}</text>'
        )
    n_ticks = 5
    for i in range(n_ticks + 1):
        y = y0 + (y1 - y0) * i / n_ticks
        out.append(
            f'<text x="{sx(x0) - 8:.2f}" y="{sy(y) + 4:.2f}" text-anchor="end">{y:.2f}</text>'
        )
    out.append(
        f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">σ (rad)</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.2f})">{LABELS[metric]}</text>'
    )
    if metric == "c_av":
        yt = sy(CONCURRENCE_THRESHOLD)
        out.append(
            f'<line class="threshold" data-value="{CONCURRENCE_THRESHOLD:.6f}" x1="{sx(x0):.2f}" '
            f'y1="{yt:.2f}" x2="{sx(x1):.2f}" y2="{yt:.2f}" stroke="gray" stroke-dasharray="6,4"/>'
        )
        out.append(
            f'<text x="{sx(x1) + 6:.2f}" y="{yt + 4:.2f}" fill="gray">1/√2</text>'
        )
    for i, (frame, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline class="series" data-frame="{escape(frame)}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>')
        ly = MARGIN["top"] + 20 * i + 10
        lx = WIDTH - MARGIN["right"] + 15
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{lx + 26}" y="{ly + 4}">{escape(frame)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
