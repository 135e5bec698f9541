"""Self-contained SVG rendering: density heatmaps with contour lines, and
PML line charts with a log-scaled return-period axis.  No external plotting
dependency; the output embeds everything it needs."""

import math
from xml.sax.saxutils import escape

import numpy as np

# Dark-blue to yellow ramp for the density fill.
_RAMP = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
]

_PALETTE = ["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"]


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    frac = pos - i
    rgb = [
        round(_RAMP[i][c] + frac * (_RAMP[i + 1][c] - _RAMP[i][c])) for c in range(3)
    ]
    return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"


def _contour_segments(Z, level):
    """Marching-squares line segments for one iso-level, in grid units.

    Z[i, j] is the value at lattice point (i, j); segments come back as
    ((x1, y1), (x2, y2)) tuples in the same coordinates.
    """
    segs = []
    ni, nj = Z.shape

    def interp(v0, v1, p0, p1):
        t = 0.5 if v1 == v0 else (level - v0) / (v1 - v0)
        return (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))

    for i in range(ni - 1):
        for j in range(nj - 1):
            corners = [
                (Z[i, j], (i, j)),
                (Z[i + 1, j], (i + 1, j)),
                (Z[i + 1, j + 1], (i + 1, j + 1)),
                (Z[i, j + 1], (i, j + 1)),
            ]
            above = [v >= level for v, _ in corners]
            if all(above) or not any(above):
                continue
            crossings = []
            for e in range(4):
                v0, p0 = corners[e]
                v1, p1 = corners[(e + 1) % 4]
                if (v0 >= level) != (v1 >= level):
                    crossings.append(interp(v0, v1, p0, p1))
            for k in range(0, len(crossings) - 1, 2):
                segs.append((crossings[k], crossings[k + 1]))
    return segs


def density_svg(Z, path, title: str = "", levels: int = 7, points=None) -> None:
    """Render a density matrix over the unit square: filled cells plus
    contour lines, with an optional scatter overlay.

    Z[i, j] is the density at ((i + 0.5)/r, (j + 0.5)/r); axis 0 runs along
    the horizontal screen axis and axis 1 upward.
    """
    Z = np.asarray(Z, dtype=float)
    res = Z.shape[0]
    size, margin = 440, 50
    plot = size - 2 * margin
    lo, hi = float(Z.min()), float(Z.max())
    span = (hi - lo) or 1.0

    def sx(u):
        return margin + u * plot

    def sy(v):
        return size - margin - v * plot

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cell = plot / res
    for i in range(res):
        for j in range(res):
            color = _ramp_color((Z[i, j] - lo) / span)
            parts.append(
                f'<rect x="{sx(i / res):.2f}" y="{sy((j + 1) / res):.2f}" '
                f'width="{cell + 0.5:.2f}" height="{cell + 0.5:.2f}" fill="{color}"/>'
            )
    for level in np.linspace(lo, hi, levels + 2)[1:-1]:
        for (x1, y1), (x2, y2) in _contour_segments(Z, level):
            # lattice coordinates are cell midpoints
            parts.append(
                f'<line x1="{sx((x1 + 0.5) / res):.2f}" y1="{sy((y1 + 0.5) / res):.2f}" '
                f'x2="{sx((x2 + 0.5) / res):.2f}" y2="{sy((y2 + 0.5) / res):.2f}" '
                'stroke="black" stroke-width="0.6" stroke-opacity="0.6"/>'
            )
    if points is not None:
        for u, v in np.asarray(points, dtype=float):
            parts.append(
                f'<circle cx="{sx(u):.2f}" cy="{sy(v):.2f}" r="3" fill="none" '
                'stroke="red" stroke-width="1.2"/>'
            )
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" '
        'fill="none" stroke="black"/>'
    )
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<text x="{sx(tick):.1f}" y="{size - margin + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{tick:g}</text>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{sy(tick) + 4:.1f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{tick:g}</text>'
        )
    if title:
        parts.append(
            f'<text x="{size / 2}" y="28" font-size="14" text-anchor="middle" '
            f'font-family="sans-serif">{escape(title)}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def pml_svg(return_periods, series, path, title: str = "PML by return period") -> None:
    """Line chart of PML curves: one polyline per (label, values) pair,
    return periods on a log axis."""
    periods = np.asarray(return_periods, dtype=float)
    width, height, margin = 640, 420, 60
    px, py = width - 2 * margin, height - 2 * margin
    lx = np.log10(periods)
    x0, x1 = float(lx.min()), float(lx.max())
    xspan = (x1 - x0) or 1.0
    allv = np.concatenate([np.asarray(v, float) for _, v in series])
    y0, y1 = float(allv.min()), float(allv.max())
    yspan = (y1 - y0) or 1.0
    y0 -= 0.05 * yspan
    y1 += 0.05 * yspan
    yspan = y1 - y0

    def sx(t):
        return margin + (math.log10(t) - x0) / xspan * px

    def sy(v):
        return height - margin - (v - y0) / yspan * py

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{px}" height="{py}" fill="none" stroke="black"/>',
    ]
    for t in sorted(set(np.round(periods, 6))):
        parts.append(
            f'<line x1="{sx(t):.1f}" y1="{margin}" x2="{sx(t):.1f}" '
            f'y2="{height - margin}" stroke="#cccccc" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{sx(t):.1f}" y="{height - margin + 16}" font-size="10" '
            f'text-anchor="middle" font-family="sans-serif">{t:g}</text>'
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = y0 + frac * yspan
        parts.append(
            f'<text x="{margin - 6}" y="{sy(v) + 3:.1f}" font-size="10" '
            f'text-anchor="end" font-family="sans-serif">{v:.3g}</text>'
        )
    for idx, (label, values) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(t):.1f},{sy(v):.1f}" for t, v in zip(periods, values))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        ly = margin + 16 + 16 * idx
        parts.append(
            f'<line x1="{width - margin - 150}" y1="{ly - 4}" x2="{width - margin - 126}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width - margin - 120}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">{escape(str(label))}</text>'
        )
    parts.append(
        f'<text x="{width / 2}" y="26" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif">{escape(title)}</text>'
    )
    parts.append(
        f'<text x="{width / 2}" y="{height - 12}" font-size="11" text-anchor="middle" '
        f'font-family="sans-serif">return period (years, log scale)</text>'
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
