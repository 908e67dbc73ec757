"""Deterministic SVG heatmaps of 2-D spectra.

Output is plain text assembled with fixed formatting, so identical inputs
produce byte-identical files. Cells are laid out on the index grid with
axis ticks labeled by the factor eigenvalues (frequency axis 1 horizontal,
axis 2 vertical, origin at the lower left).
"""

from __future__ import annotations

from ._colormap import color_for
from .transforms import Spectrum2D

_CELL = 24
_MARGIN_LEFT = 64
_MARGIN_BOTTOM = 40
_MARGIN_TOP = 16
_MARGIN_RIGHT = 16


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def spectrum_heatmap_svg(s: Spectrum2D, title: str = "") -> str:
    """Render spectral power as an SVG heatmap string."""
    power = s.power()
    n1, n2 = power.shape
    vmax = float(power.max())
    width = _MARGIN_LEFT + n1 * _CELL + _MARGIN_RIGHT
    height = _MARGIN_TOP + n2 * _CELL + _MARGIN_BOTTOM

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{_MARGIN_LEFT}" y="12" font-family="monospace" font-size="10">{title}</text>'
        )
    for k1 in range(n1):
        for k2 in range(n2):
            x = _MARGIN_LEFT + k1 * _CELL
            y = _MARGIN_TOP + (n2 - 1 - k2) * _CELL
            col = color_for(float(power[k1, k2]), vmax)
            out.append(f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" fill="{col}"/>')
    # axis tick labels: eigenvalues along each frequency axis
    ybase = _MARGIN_TOP + n2 * _CELL
    for k1 in range(n1):
        x = _MARGIN_LEFT + k1 * _CELL + _CELL // 2
        out.append(
            f'<text x="{x}" y="{ybase + 12}" font-family="monospace" font-size="8" '
            f'text-anchor="middle">{_fmt(float(s.lambdas1[k1]))}</text>'
        )
    for k2 in range(n2):
        y = _MARGIN_TOP + (n2 - 1 - k2) * _CELL + _CELL // 2 + 3
        out.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y}" font-family="monospace" font-size="8" '
            f'text-anchor="end">{_fmt(float(s.lambdas2[k2]))}</text>'
        )
    out.append(
        f'<text x="{_MARGIN_LEFT + n1 * _CELL // 2}" y="{ybase + 28}" font-family="monospace" '
        f'font-size="9" text-anchor="middle">frequency along factor 1</text>'
    )
    out.append(
        f'<text x="12" y="{_MARGIN_TOP + n2 * _CELL // 2}" font-family="monospace" font-size="9" '
        f'text-anchor="middle" transform="rotate(-90 12 {_MARGIN_TOP + n2 * _CELL // 2})">'
        f"frequency along factor 2</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
