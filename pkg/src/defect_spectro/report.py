"""Deterministic CSV and SVG writers.

CSV: comma separated, header row, LF endings, floats with 12 significant
digits. SVG: fixed element order, coordinates rounded to 0.01 px, no
timestamps.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyData
from .thermo import FormationLine, stability_map

__all__ = ["fmt", "csv_text", "emit_svg_diagram", "FERMI_GRID_STEP"]

FERMI_GRID_STEP = 1e-3  # eV

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 80, 20, 40, 60
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            return "0"
        return f"{v:.12g}"
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _c(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


class _Frame:
    def __init__(self, xlim, ylim):
        x0, x1 = xlim
        y0, y1 = ylim
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x0 + 0.5
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y0 + 0.5
        pad = 0.05 * (y1 - y0)
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0 - pad, y1 + pad
        self.w = _WIDTH - _MARGIN_L - _MARGIN_R
        self.h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(self, x):
        return _MARGIN_L + (np.asarray(x, dtype=float) - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        return _MARGIN_T + (self.y1 - np.asarray(y, dtype=float)) / (self.y1 - self.y0) * self.h


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else float(t))
        t += step
    return out


def _axes(frame: _Frame, xlabel: str, ylabel: str, title: str) -> list[str]:
    x_axis_y = _MARGIN_T + frame.h
    parts = [
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{frame.w}" height="{frame.h}" fill="none" stroke="#000000"/>',
    ]
    for t in _ticks(frame.x0, frame.x1):
        x = _c(float(frame.px(t)))
        parts.append(f'<line x1="{x}" y1="{x_axis_y}" x2="{x}" y2="{x_axis_y + 5}" stroke="#000000"/>')
        parts.append(f'<text x="{x}" y="{x_axis_y + 18}" text-anchor="middle" font-size="11">{t:g}</text>')
    for t in _ticks(frame.y0, frame.y1):
        y = _c(float(frame.py(t)))
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{y}" x2="{_MARGIN_L}" y2="{y}" stroke="#000000"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" font-size="11">{t:g}</text>')
    parts.append(
        f'<text x="{_MARGIN_L + frame.w / 2:.2f}" y="{_HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="20" y="{_MARGIN_T + frame.h / 2:.2f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {_MARGIN_T + frame.h / 2:.2f})">{escape(ylabel)}</text>'
    )
    if title:
        parts.append(f'<text x="{_WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    return parts


def _polyline(xs, ys, color: str, cls: str, extra: str = "") -> str:
    pts = " ".join(f"{_c(x)},{_c(y)}" for x, y in zip(xs, ys))
    return f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>'


def _document(parts: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">\n'
    )
    return head + "\n".join(parts) + "\n</svg>\n"


def _formation_svg(data: dict) -> str:
    lines: list[FormationLine] = list(data.get("lines", []))
    if not lines:
        raise EmptyData("formation diagram needs at least one line")
    gap = float(data["gap"])
    title = data.get("title", "")
    n = int(round(gap / FERMI_GRID_STEP))
    grid = np.linspace(0.0, gap, n + 1)
    values = [ln(grid) for ln in lines]
    smap = stability_map(lines, gap)
    frame = _Frame((0.0, gap), (min(v.min() for v in values), max(v.max() for v in values)))
    parts = _axes(frame, "Fermi level above VBM (eV)", "Formation energy (eV)", title)

    ordered = sorted(zip(lines, values), key=lambda t: (t[0].label, -t[0].charge))
    for k, (ln, val) in enumerate(ordered):
        color = _PALETTE[k % len(_PALETTE)]
        parts.append(_polyline(frame.px(grid), frame.py(val), color, "formation-line", f' data-charge="{ln.charge}"'))
        ly = float(frame.py(val[-1]))
        parts.append(
            f'<text x="{_c(float(frame.px(gap)) - 4)}" y="{_c(ly - 4)}" text-anchor="end" font-size="11" '
            f'fill="{color}">q={ln.charge:+d}</text>'
        )
    # lower envelope and transition levels
    env_x = [smap.intervals[0].start] + [iv.end for iv in smap.intervals]
    by_charge = {ln.charge: ln for ln in lines}
    env_y = [by_charge[smap.intervals[0].charge](env_x[0])] + [by_charge[iv.charge](iv.end) for iv in smap.intervals]
    d = " ".join(
        f"{'M' if i == 0 else 'L'}{_c(float(frame.px(x)))},{_c(float(frame.py(y)))}" for i, (x, y) in enumerate(zip(env_x, env_y))
    )
    parts.append(f'<path class="envelope" d="{d}" fill="none" stroke="#000000" stroke-width="3" stroke-opacity="0.35"/>')
    for ctl in smap.transition_levels():
        y = by_charge[ctl.q1](ctl.level)
        parts.append(
            f'<circle class="crossing" cx="{_c(float(frame.px(ctl.level)))}" cy="{_c(float(frame.py(y)))}" r="4" '
            f'fill="#000000" data-q1="{ctl.q1}" data-q2="{ctl.q2}"/>'
        )
    return _document(parts)


def _levels_svg(data: dict) -> str:
    sweep = list(data.get("sweep", []))
    if not sweep or len(sweep[0]) == 0:
        raise EmptyData("level diagram needs at least one field point with one level")
    title = data.get("title", "")
    fields = np.array([float(np.linalg.norm(d.field)) for d in sweep])
    energies = np.array([d.by_branch() for d in sweep])  # (n_fields, n_levels)
    single = len(sweep) == 1
    xlim = (fields[0] - 0.5, fields[0] + 0.5) if single else (fields.min(), fields.max())
    frame = _Frame(xlim, (energies.min(), energies.max()))
    parts = _axes(frame, "Magnetic field (T)", "Energy (MHz)", title)
    xs = np.array([frame.x0, frame.x1]) if single else fields
    for j in range(energies.shape[1]):
        ys = np.repeat(energies[0, j], 2) if single else energies[:, j]
        color = _PALETTE[j % len(_PALETTE)]
        parts.append(_polyline(frame.px(xs), frame.py(ys), color, "level", f' data-branch="{j}"'))
    return _document(parts)


def emit_svg_diagram(kind: str, data: dict) -> str:
    """SVG document for ``kind`` in {"formation", "levels"}.

    formation: ``{"lines": [FormationLine], "gap": eV, "title": str}``
    levels: ``{"sweep": [LevelDiagram], "title": str}``
    """
    if kind == "formation":
        return _formation_svg(data)
    if kind == "levels":
        return _levels_svg(data)
    raise ValueError(f"unknown diagram kind {kind!r}")
