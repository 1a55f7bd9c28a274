"""Minimal static SVG line charts, so plots need no plotting library."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 360
MARGIN = 56


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def line_chart_svg(x, y, title="", xlabel="", ylabel="", max_points=2000) -> str:
    """Render one series as an SVG document string.

    Long series are decimated by striding so the file stays small; output is
    a pure function of the input, which keeps plot files reproducible.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two equal-length series with at least two points")
    step = max(1, len(x) // max_points)
    x, y = x[::step], y[::step]
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * ph

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>',
    ]
    for v in _ticks(x0, x1):
        parts.append(f'<text x="{sx(v):.1f}" y="{HEIGHT - MARGIN + 16}" '
                     f'text-anchor="middle">{v:.4g}</text>')
    for v in _ticks(y0, y1):
        parts.append(f'<text x="{MARGIN - 6}" y="{sy(v) + 4:.1f}" '
                     f'text-anchor="end">{v:.4g}</text>')
    parts += [
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1" points="{pts}"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN - 20}" text-anchor="middle" '
        f'font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
