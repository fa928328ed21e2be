"""Minimal static SVG line plots: stacked panels of polylines with axes and labels."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
PANEL_HEIGHT = 300
MARGIN = dict(left=80, right=20, top=30, bottom=50)
COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910")


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    dashed: bool = False


@dataclass
class Panel:
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)
    logx: bool = False
    logy: bool = False
    title: str = ""

    def add(self, x, y, label="", dashed=False) -> "Panel":
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, dashed))
        return self


def _ticks(lo, hi, n=5):
    if lo == hi:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _finite_range(values, log):
    v = np.concatenate([np.asarray(a, float) for a in values]) if values else np.array([])
    v = v[np.isfinite(v)]
    if log:
        v = v[v > 0]
        v = np.log10(v) if v.size else v
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _panel_svg(panel: Panel, y0: float) -> list:
    x0 = MARGIN["left"]
    w = WIDTH - MARGIN["left"] - MARGIN["right"]
    h = PANEL_HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    top = y0 + MARGIN["top"]
    xr = _finite_range([s.x for s in panel.series], panel.logx)
    yr = _finite_range([s.y for s in panel.series], panel.logy)

    def tx(v):
        return x0 + (v - xr[0]) / (xr[1] - xr[0]) * w

    def ty(v):
        return top + h - (v - yr[0]) / (yr[1] - yr[0]) * h

    out = [f'<g class="panel">',
           f'<rect x="{x0}" y="{top}" width="{w}" height="{h}" fill="none" stroke="#000"/>']
    for t in _ticks(*xr):
        lab = f"1e{t:.1f}" if panel.logx else f"{t:.3g}"
        out.append(f'<text x="{tx(t):.2f}" y="{top + h + 16}" font-size="11" text-anchor="middle">{lab}</text>')
    for t in _ticks(*yr):
        lab = f"1e{t:.1f}" if panel.logy else f"{t:.3g}"
        out.append(f'<text x="{x0 - 6}" y="{ty(t) + 4:.2f}" font-size="11" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{x0 + w / 2}" y="{top + h + 38}" font-size="13" text-anchor="middle">'
               f"{escape(panel.xlabel)}</text>")
    out.append(f'<text x="{x0 - 62}" y="{top + h / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 {x0 - 62} {top + h / 2})">{escape(panel.ylabel)}</text>')
    if panel.title:
        out.append(f'<text x="{x0}" y="{top - 10}" font-size="13">{escape(panel.title)}</text>')

    for i, s in enumerate(panel.series):
        x, y = s.x, s.y
        ok = np.isfinite(x) & np.isfinite(y)
        if panel.logx:
            ok &= x > 0
        if panel.logy:
            ok &= y > 0
        x, y = x[ok], y[ok]
        if panel.logx:
            x = np.log10(x)
        if panel.logy:
            y = np.log10(y)
        pts = " ".join(f"{tx(a):.2f},{ty(b):.2f}" for a, b in zip(x, y))
        color = COLORS[i % len(COLORS)]
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        if s.label:
            ly = top + 14 + 16 * i
            out.append(f'<text x="{x0 + w - 8}" y="{ly}" font-size="11" text-anchor="end" '
                       f'fill="{color}">{escape(s.label)}</text>')
    out.append("</g>")
    return out


def render(panels) -> str:
    height = PANEL_HEIGHT * len(panels)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {height}" '
             f'width="{WIDTH}" height="{height}">',
             f'<rect width="{WIDTH}" height="{height}" fill="#fff"/>']
    for i, p in enumerate(panels):
        lines += _panel_svg(p, i * PANEL_HEIGHT)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def save(path, panels) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(panels), encoding="utf-8")
    return path
