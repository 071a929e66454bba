"""Static SVG report rendering: partition maps, value heatmaps, pass
trajectories, and the unsuccessful-pass CDF.

All output is plain SVG text with fixed float formatting, so identical
inputs give identical bytes. Cluster regions are drawn as the
nearest-centroid cells of the spatial centroid projections, rasterized
on a fine grid and merged into one path per cluster; display geometry
never feeds back into assignment logic.
"""

from __future__ import annotations

import colorsys
from typing import Iterable, Sequence

import numpy as np

from .fieldvalue import FieldValues
from .metric import GroupCdf, QPassRecord
from .partition import Clustering, TeamPartition

_GRID = 100  # cells per axis for region rasterization


def diverging_color(value: float) -> str:
    """Blue (-1) through white (0) to red (+1); monotone per channel."""
    v = min(max(value, -1.0), 1.0)
    if v >= 0:
        k = int(round(255 * (1 - v)))
        r, g, b = 255, k, k
    else:
        k = int(round(255 * (1 + v)))
        r, g, b = k, k, 255
    return f"#{r:02x}{g:02x}{b:02x}"


def cluster_color(index: int, count: int) -> str:
    hue = (index * 0.618033988749895) % 1.0
    r, g, b = colorsys.hls_to_rgb(hue, 0.72, 0.55)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _svg_open(width: int = 100, height: int = 100, extra: int = 0) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width + extra} '
        f'{height}" width="{6 * (width + extra)}" height="{6 * height}">',
    ]


def _pitch_outline() -> list[str]:
    # pitch in [0,100]^2, attack left to right
    return [
        '<g class="pitch" fill="none" stroke="#444444" stroke-width="0.4">',
        '<rect x="0" y="0" width="100" height="100"/>',
        '<line x1="50" y1="0" x2="50" y2="100"/>',
        '<circle cx="50" cy="50" r="9"/>',
        '<rect x="0" y="21" width="17" height="58"/>',
        '<rect x="83" y="21" width="17" height="58"/>',
        '<rect x="0" y="40" width="6" height="20"/>',
        '<rect x="94" y="40" width="6" height="20"/>',
        "</g>",
    ]


def _region_cells(cl: Clustering) -> np.ndarray:
    """Grid of nearest-centroid (spatial) labels, shape (_GRID, _GRID)."""
    step = 100.0 / _GRID
    centers = (np.arange(_GRID) + 0.5) * step
    xs, ys = np.meshgrid(centers, centers, indexing="ij")
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    return cl.assign_spatial(pts).reshape(_GRID, _GRID)


def _region_paths(cl: Clustering, fills: Sequence[str]) -> list[str]:
    """One <path class="region"> per cluster, covering its grid cells."""
    labels = _region_cells(cl)
    step = 100.0 / _GRID
    paths = []
    for k in range(cl.c):
        ii, jj = np.nonzero(labels == k)
        segments = []
        # merge horizontal runs per row to keep the path compact
        for i in np.unique(ii):
            cols = np.sort(jj[ii == i])
            run_start = prev = cols[0]
            for col in cols[1:]:
                if col != prev + 1:
                    segments.append((i, run_start, prev))
                    run_start = col
                prev = col
            segments.append((i, run_start, prev))
        d = "".join(
            f"M{i * step:.1f} {j0 * step:.1f}h{step:.1f}"
            f"v{(j1 - j0 + 1) * step:.1f}h-{step:.1f}z"
            for i, j0, j1 in segments)
        paths.append(f'<path class="region" fill="{fills[k]}" '
                     f'stroke="#ffffff" stroke-width="0.15" d="{d}"/>')
    return paths


def render_partition_map(partition: TeamPartition, side: str = "own") -> str:
    cl = partition.own if side == "own" else partition.opp
    fills = [cluster_color(k, cl.c) for k in range(cl.c)]
    doc = _svg_open()
    doc.extend(_region_paths(cl, fills))
    doc.extend(_pitch_outline())
    doc.append("</svg>")
    return "\n".join(doc) + "\n"


def render_value_heatmap(partition: TeamPartition, fv: FieldValues,
                         side: str = "own") -> str:
    cl = partition.own if side == "own" else partition.opp
    offset = 0 if side == "own" else fv.c
    fills = [diverging_color(fv.values[offset + k]) for k in range(cl.c)]
    doc = _svg_open(extra=14)
    doc.extend(_region_paths(cl, fills))
    doc.extend(_pitch_outline())
    # legend: vertical diverging ramp from +1 (top) to -1 (bottom)
    doc.append('<g class="legend">')
    for i in range(40):
        v = 1.0 - 2.0 * (i + 0.5) / 40
        doc.append(f'<rect x="104" y="{10 + i * 2}" width="5" height="2" '
                   f'fill="{diverging_color(v)}"/>')
    doc.append('<text x="104" y="8" font-size="4" fill="#000000">+1</text>')
    doc.append('<text x="104" y="96" font-size="4" fill="#000000">-1</text>')
    doc.append("</g>")
    doc.append("</svg>")
    return "\n".join(doc) + "\n"


def _arrow(rec: QPassRecord) -> str:
    p = rec.pass_ref
    x1, y1, x2, y2 = p.start.x, p.start.y, p.end.x, p.end.y
    dx, dy = x2 - x1, y2 - y1
    length = (dx * dx + dy * dy) ** 0.5
    style = ('stroke="#1f6fb2"' if rec.successful
             else 'stroke="#c23b22" stroke-dasharray="2,1.4"')
    if length < 1e-9:
        return (f'<circle class="arrow" cx="{x1:.2f}" cy="{y1:.2f}" r="0.8" '
                f'fill="none" {style} stroke-width="0.5"/>')
    ux, uy = dx / length, dy / length
    hx, hy = x2 - 2.2 * ux, y2 - 2.2 * uy
    head = (f"{x2:.2f},{y2:.2f} {hx - 0.9 * uy:.2f},{hy + 0.9 * ux:.2f} "
            f"{hx + 0.9 * uy:.2f},{hy - 0.9 * ux:.2f}")
    color = "#1f6fb2" if rec.successful else "#c23b22"
    return (f'<g class="arrow"><line x1="{x1:.2f}" y1="{y1:.2f}" '
            f'x2="{x2:.2f}" y2="{y2:.2f}" {style} stroke-width="0.5" '
            f'fill="none"/><polygon points="{head}" fill="{color}"/></g>')


def render_pass_trajectories(records: Iterable[QPassRecord]) -> str:
    records = list(records)
    if not records:
        raise ValueError("no passes to render")
    doc = _svg_open()
    doc.extend(_pitch_outline())
    doc.extend(_arrow(rec) for rec in records)
    doc.append("</svg>")
    return "\n".join(doc) + "\n"


def render_cdf(cdfs: dict[str, GroupCdf]) -> str:
    """Step plot of the per-position unsuccessful-pass QPass CDFs over
    qpass in [-2, 2]."""
    colors = {"GK": "#1f6fb2", "DF": "#2e8540", "MF": "#b8860b", "FW": "#c23b22"}
    doc = _svg_open(extra=20)
    doc.append('<rect x="0" y="0" width="100" height="100" fill="none" '
               'stroke="#444444" stroke-width="0.4"/>')
    doc.append('<line x1="50" y1="0" x2="50" y2="100" stroke="#bbbbbb" '
               'stroke-width="0.3"/>')
    for li, (pos, cdf) in enumerate(sorted(cdfs.items())):
        pts = " ".join(
            f"{(v + 2.0) * 25:.2f},{100 - f * 100:.2f}"
            for v, f in zip(cdf.values, cdf.fractions))
        doc.append(f'<polyline class="cdf" fill="none" '
                   f'stroke="{colors.get(pos, "#000000")}" stroke-width="0.6" '
                   f'points="{pts}"/>')
        doc.append(f'<text x="104" y="{10 + 6 * li}" font-size="4" '
                   f'fill="{colors.get(pos, "#000000")}">{pos} '
                   f'({cdf.beneficial_fraction * 100:.0f}% &gt; 0)</text>')
    doc.append("</svg>")
    return "\n".join(doc) + "\n"
