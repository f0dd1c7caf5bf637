"""Minimal self-contained SVG line charts, one panel per ordered channel pair."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

MAGENTA = "#c000c0"
GREEN = "#008000"
LIGHT_GREEN = "#66cc66"
BLACK = "#202020"

PANEL = 120
GAP = 14
MARGIN = 40


def _polyline(xs, ys, x0, y0, xlim, ylim, color) -> str:
    sx = PANEL / (xlim[1] - xlim[0]) if xlim[1] > xlim[0] else 0.0
    sy = PANEL / (ylim[1] - ylim[0])
    pts = " ".join(
        f"{x0 + (x - xlim[0]) * sx:.2f},{y0 + PANEL - (min(max(y, ylim[0]), ylim[1]) - ylim[0]) * sy:.2f}"
        for x, y in zip(xs, ys)
    )
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>'


def panel_grid(path, freqs, series, title: str, ylim=(0.0, 1.0), colors=None) -> None:
    """Write a p x p grid: row i, column j plots ``values[:, i, j]``.

    ``series`` maps a legend label to an ``(F, p, p)`` array. Rows are
    receivers and columns senders; diagonal panels are left empty.
    """
    labels = list(series)
    colors = colors or [MAGENTA, GREEN, LIGHT_GREEN, BLACK]
    p = next(iter(series.values())).shape[1]
    freqs = np.asarray(freqs, dtype=float)
    xlim = (float(freqs.min()), float(freqs.max()))
    size = 2 * MARGIN + p * PANEL + (p - 1) * GAP
    height = size + 20 * len(labels)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" '
        f'viewBox="0 0 {size} {height}" font-family="sans-serif" font-size="10">',
        f'<rect width="{size}" height="{height}" fill="white"/>',
        f'<text x="{MARGIN}" y="{MARGIN - 22}" font-size="13">{escape(title)}</text>',
    ]
    for i in range(p):
        for j in range(p):
            x0 = MARGIN + j * (PANEL + GAP)
            y0 = MARGIN + i * (PANEL + GAP)
            if i == 0:
                out.append(f'<text x="{x0 + PANEL / 2:.1f}" y="{MARGIN - 6}" text-anchor="middle">from {j + 1}</text>')
            if j == 0:
                out.append(f'<text x="{MARGIN - 6}" y="{y0 + PANEL / 2:.1f}" text-anchor="end">to {i + 1}</text>')
            if i == j:
                continue
            out.append(f'<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#999"/>')
            for label, color in zip(labels, colors):
                out.append(_polyline(freqs, series[label][:, i, j], x0, y0, xlim, ylim, color))
    axis_y = MARGIN + p * PANEL + (p - 1) * GAP + 14
    out.append(f'<text x="{MARGIN}" y="{axis_y}">{xlim[0]:g} to {xlim[1]:g} Hz; '
               f'vertical range {ylim[0]:g} to {ylim[1]:g}</text>')
    for k, (label, color) in enumerate(zip(labels, colors)):
        y = axis_y + 16 * (k + 1)
        out.append(f'<line x1="{MARGIN}" y1="{y - 4}" x2="{MARGIN + 20}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{MARGIN + 26}" y="{y}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out))
        fh.write("\n")
