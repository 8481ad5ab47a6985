"""Deterministic CSV and SVG writers.

CSV: ``#``-prefixed ``key=value`` metadata lines, one header row, values in
``%.9g``.  SVG: fixed 800x600 canvas, one polyline per curve, legend labels
equal to the CSV column names.  Curves are quantised to the CSV precision
before plotting so a figure redrawn from its CSVs is identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import __version__

WIDTH, HEIGHT = 800, 600
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")
DASHES = ("", "6,3", "2,2", "8,3,2,3", "1,3", "", "4,2")


def fmt(v: float) -> str:
    return f"{float(v):.9g}"


def quantise(values) -> np.ndarray:
    return np.array([float(fmt(v)) for v in np.ravel(values)])


def metadata_lines(meta: Mapping[str, object]) -> list[str]:
    return [f"# {k}={meta[k]}" for k in sorted(meta)]


def write_csv(path, columns: Mapping[str, Sequence[float]], meta: Mapping[str, object]) -> str:
    names = list(columns)
    cols = [np.ravel(np.asarray(columns[n], dtype=float)) for n in names]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns differ in length")
    lines = metadata_lines(meta)
    lines.append(",".join(names))
    for i in range(n):
        lines.append(",".join(fmt(c[i]) for c in cols))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return os.fspath(path)


def read_csv(path) -> tuple[dict, dict]:
    """Return ``(columns, metadata)`` from a file written by :func:`write_csv`."""
    meta, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {h: arr[:, j] for j, h in enumerate(header)}, meta


@dataclass
class Panel:
    title: str
    x: np.ndarray
    curves: dict  # label -> y values on x
    xlabel: str = "x"
    ylabel: str = ""
    x_of: dict = None  # optional per-curve x arrays


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def _panel_svg(panel: Panel, ox: float, oy: float, w: float, h: float) -> list[str]:
    left, right, top, bottom = 60.0, 15.0, 35.0, 50.0
    px0, py0 = ox + left, oy + top
    pw, ph = w - left - right, h - top - bottom
    xs_all = [quantise(panel.x)]
    if panel.x_of:
        xs_all += [quantise(v) for v in panel.x_of.values()]
    xlo = min(float(v.min()) for v in xs_all)
    xhi = max(float(v.max()) for v in xs_all)
    if xhi == xlo:
        xhi = xlo + 1.0
    ylo, yhi = 0.0, 1.0

    def sx(v):
        return px0 + (v - xlo) / (xhi - xlo) * pw

    def sy(v):
        return py0 + ph - (v - ylo) / (yhi - ylo) * ph

    out = ['<g class="panel">',
           f'<text x="{ox + w / 2:.1f}" y="{oy + 20:.1f}" text-anchor="middle" '
           f'font-size="14">{panel.title}</text>',
           f'<rect x="{px0:.1f}" y="{py0:.1f}" width="{pw:.1f}" height="{ph:.1f}" '
           f'fill="none" stroke="black"/>']
    for t in _ticks(xlo, xhi):
        out.append(f'<text x="{sx(t):.1f}" y="{py0 + ph + 16:.1f}" text-anchor="middle" '
                   f'font-size="10">{t:.3g}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<text x="{px0 - 6:.1f}" y="{sy(t) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{t:.3g}</text>')
    out.append(f'<text x="{px0 + pw / 2:.1f}" y="{py0 + ph + 34:.1f}" text-anchor="middle" '
               f'font-size="12">{panel.xlabel}</text>')
    for i, (label, ys) in enumerate(panel.curves.items()):
        xs = quantise(panel.x_of[label]) if panel.x_of and label in panel.x_of else quantise(panel.x)
        ys = np.clip(quantise(ys), ylo, yhi)
        pts = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(xs, ys))
        dash = DASHES[i % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline data-label="{label}" fill="none" stroke="{COLORS[i % len(COLORS)]}" '
                   f'stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = py0 + 14 + 14 * i
        lx = px0 + pw - 150
        out.append(f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 20:.1f}" y2="{ly - 4:.1f}" '
                   f'stroke="{COLORS[i % len(COLORS)]}"{dash_attr}/>')
        out.append(f'<text x="{lx + 25:.1f}" y="{ly:.1f}" font-size="10">{label}</text>')
    out.append("</g>")
    return out


def render_svg(panels: Sequence[Panel], meta: Mapping[str, object]) -> str:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f"<!-- medmarg {__version__} -->",
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}">',
             "<!--"]
    lines += [m.replace("--", "- -") for m in metadata_lines(meta)]
    lines.append("-->")
    lines.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    w = WIDTH / len(panels)
    for i, p in enumerate(panels):
        lines += _panel_svg(p, i * w, 0.0, w, HEIGHT)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, panels: Sequence[Panel], meta: Mapping[str, object]) -> str:
    with open(path, "w", newline="\n") as fh:
        fh.write(render_svg(panels, meta))
    return os.fspath(path)


def polylines(svg_text: str) -> list[tuple[str, str]]:
    """``(label, points)`` for every polyline in an SVG produced here."""
    import re

    pat = re.compile(r'<polyline data-label="([^"]*)"[^>]*points="([^"]*)"')
    return pat.findall(svg_text)
