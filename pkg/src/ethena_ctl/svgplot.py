"""Minimal deterministic SVG line plots.

A small hand-rolled emitter (axes, ticks, styled polylines, legend) keeps
the figure outputs free of heavyweight plotting dependencies and byte-stable
across runs.  Styling convention throughout the package: finite horizon is
solid red, infinite horizon is dashed blue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

__all__ = ["Series", "SOLID_RED", "DASHED_BLUE", "line_plot", "write_svg"]

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 20, 34, 46


@dataclass(frozen=True)
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str
    color: str
    dash: Optional[str] = None  # SVG stroke-dasharray, None for solid


def SOLID_RED(x, y, label: str) -> Series:
    return Series(np.asarray(x, float), np.asarray(y, float), label, "#cc2222", None)


def DASHED_BLUE(x, y, label: str) -> Series:
    return Series(np.asarray(x, float), np.asarray(y, float), label, "#2244cc", "7,5")


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi == lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def line_plot(series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> str:
    xs = np.concatenate([s.x for s in series])
    ys = np.concatenate([s.y for s in series])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{title}</text>',
    ]
    # frame
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for xv in _ticks(x_lo, x_hi):
        x = px(xv)
        parts.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + plot_h}" x2="{x:.2f}" '
                     f'y2="{MARGIN_T + plot_h + 5}" stroke="#333333"/>')
        parts.append(f'<text x="{x:.2f}" y="{MARGIN_T + plot_h + 18}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="middle">{xv:.4g}</text>')
    for yv in _ticks(y_lo, y_hi):
        y = py(yv)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" '
                     f'stroke="#333333"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="end">{yv:.4g}</text>')
    parts.append(f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 8}" font-family="sans-serif" '
                 f'font-size="12" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{MARGIN_T + plot_h / 2:.1f}" font-family="sans-serif" '
                 f'font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 16 {MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>')

    for s in series:
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
                     f'stroke-width="1.8"{dash}/>')

    # legend, top-right corner of the frame
    lx, ly = MARGIN_L + plot_w - 180, MARGIN_T + 10
    parts.append(f'<rect x="{lx - 8}" y="{ly - 4}" width="186" height="{18 * len(series) + 8}" '
                 f'fill="white" stroke="#999999" stroke-width="0.8"/>')
    for i, s in enumerate(series):
        y = ly + 10 + 18 * i
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        parts.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 30}" y2="{y}" stroke="{s.color}" '
                     f'stroke-width="1.8"{dash}/>')
        parts.append(f'<text x="{lx + 36}" y="{y + 4}" font-family="sans-serif" '
                     f'font-size="11">{s.label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> None:
    with open(path, "w") as fp:
        fp.write(line_plot(series, title, xlabel, ylabel))
