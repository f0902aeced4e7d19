"""Deterministic single-panel SVG line charts for CSV artifacts.

The renderer is intentionally small: it draws the first CSV column on the
x axis and one polyline per remaining column, with axes, tick labels and
a legend.  Output is a pure function of the input text and style -- no
timestamps, no randomness -- so rendering the same artifact twice yields
byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .tabular import parse_csv

__all__ = ["PlotStyle", "render_svg", "PALETTE"]

#: Line colors, cycled in column order.
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_MARGIN_LEFT = 70.0
_MARGIN_RIGHT = 150.0
_MARGIN_TOP = 42.0
_MARGIN_BOTTOM = 52.0


@dataclass(frozen=True)
class PlotStyle:
    """Knobs for :func:`render_svg`.

    ``log_x=None`` switches to a logarithmic x axis automatically when all
    x values are positive and span at least three decades.
    """

    title: str = ""
    x_label: str = ""
    y_label: str = "value"
    width: int = 800
    height: int = 500
    log_x: bool | None = None


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] with a 1-2-5 step."""
    if not (hi > lo):
        return [lo]
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if (hi - lo) / step <= target + 0.5:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _decade_ticks(lo: float, hi: float, limit: int = 8) -> list[float]:
    d_lo = math.ceil(math.log10(lo) - 1e-9)
    d_hi = math.floor(math.log10(hi) + 1e-9)
    decades = list(range(d_lo, d_hi + 1))
    stride = max(1, math.ceil(len(decades) / limit))
    return [10.0**d for d in decades[::stride]]


def _finite_segments(x: np.ndarray, y: np.ndarray):
    """Runs of consecutive points where both coordinates are finite."""
    ok = np.isfinite(x) & np.isfinite(y)
    segments = []
    start = None
    for i, good in enumerate(ok):
        if good and start is None:
            start = i
        elif not good and start is not None:
            segments.append((start, i))
            start = None
    if start is not None:
        segments.append((start, len(ok)))
    return [(x[a:b], y[a:b]) for a, b in segments if b - a >= 2]


def render_svg(csv_text: str, style: PlotStyle | None = None) -> str:
    """Render a CSV artifact (first column = x) to an SVG line chart."""
    style = style or PlotStyle()
    try:
        metadata, names, columns = parse_csv(csv_text)
    except ValueError as exc:
        raise SchemaError(f"cannot plot CSV: {exc}") from None
    if len(names) < 2:
        raise SchemaError("CSV needs an x column and at least one data column")
    if len(columns[0]) < 2:
        raise SchemaError("CSV needs at least two data rows to draw lines")

    x = np.asarray(columns[0], dtype=float)
    series = [(names[j], np.asarray(columns[j], dtype=float)) for j in range(1, len(names))]

    finite_x = x[np.isfinite(x)]
    if finite_x.size < 2:
        raise SchemaError("x column has fewer than two finite values")
    log_x = style.log_x
    if log_x is None:
        log_x = bool(np.all(finite_x > 0.0) and finite_x.max() / finite_x.min() >= 1e3)
    if log_x and np.any(finite_x <= 0.0):
        raise SchemaError("logarithmic x axis requires positive x values")

    tx = np.log10(x, where=x > 0, out=np.full_like(x, np.nan)) if log_x else x
    x_lo, x_hi = float(np.nanmin(tx)), float(np.nanmax(tx))
    if not x_hi > x_lo:
        x_hi = x_lo + 1.0

    y_all = np.concatenate([y[np.isfinite(y)] for _, y in series])
    if y_all.size == 0:
        raise SchemaError("no finite values to plot")
    y_lo, y_hi = float(y_all.min()), float(y_all.max())
    pad = 0.05 * (y_hi - y_lo) or max(1e-12, 0.1 * abs(y_hi))
    y_lo, y_hi = y_lo - pad, y_hi + pad

    w, h = float(style.width), float(style.height)
    px_lo, px_hi = _MARGIN_LEFT, w - _MARGIN_RIGHT
    py_lo, py_hi = h - _MARGIN_BOTTOM, _MARGIN_TOP

    def sx(v: float) -> float:
        return px_lo + (v - x_lo) / (x_hi - x_lo) * (px_hi - px_lo)

    def sy(v: float) -> float:
        return py_lo + (v - y_lo) / (y_hi - y_lo) * (py_hi - py_lo)

    title = style.title or (metadata[0] if metadata else "")
    x_label = style.x_label or names[0] + (" (log scale)" if log_x else "")

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">'
    )
    out.append(f'<rect width="{style.width}" height="{style.height}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{w / 2:.2f}" y="24" font-family="sans-serif" font-size="15" '
            f'text-anchor="middle">{_escape(title)}</text>'
        )

    # axes box
    out.append(
        f'<rect x="{px_lo:.2f}" y="{py_hi:.2f}" width="{px_hi - px_lo:.2f}" '
        f'height="{py_lo - py_hi:.2f}" fill="none" stroke="#333333" stroke-width="1"/>'
    )

    if log_x:
        xticks = _decade_ticks(10.0**x_lo, 10.0**x_hi)
        xpos = [math.log10(t) for t in xticks]
    else:
        xticks = _nice_ticks(x_lo, x_hi)
        xpos = xticks
    for value, at in zip(xticks, xpos):
        px = sx(at)
        out.append(
            f'<line x1="{px:.2f}" y1="{py_lo:.2f}" x2="{px:.2f}" y2="{py_lo + 5:.2f}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{py_lo + 18:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{value:g}</text>'
        )
    for value in _nice_ticks(y_lo, y_hi):
        py = sy(value)
        out.append(
            f'<line x1="{px_lo - 5:.2f}" y1="{py:.2f}" x2="{px_lo:.2f}" y2="{py:.2f}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px_lo - 8:.2f}" y="{py + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{value:g}</text>'
        )

    out.append(
        f'<text x="{(px_lo + px_hi) / 2:.2f}" y="{h - 14:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{(py_lo + py_hi) / 2:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 20 {(py_lo + py_hi) / 2:.2f})">'
        f"{_escape(style.y_label)}</text>"
    )

    for j, (name, y) in enumerate(series):
        color = PALETTE[j % len(PALETTE)]
        for seg_x, seg_y in _finite_segments(tx, y):
            points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(seg_x, seg_y))
            out.append(
                f'<polyline points="{points}" fill="none" stroke="{color}" '
                f'stroke-width="1.8"/>'
            )
        ly = py_hi + 16 + 20 * j
        lx = px_hi + 12
        out.append(
            f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" x2="{lx + 24:.2f}" y2="{ly - 4:.2f}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        out.append(
            f'<text x="{lx + 30:.2f}" y="{ly:.2f}" font-family="sans-serif" '
            f'font-size="12">{_escape(name)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
