"""Minimal dependency-free SVG emitter for line and scatter plots.

Output is byte-deterministic for fixed input: floats are formatted with a
fixed precision and no timestamps or randomness enter the file.  Log axes
drop non-positive values; the number of dropped points is returned so
callers can surface it in their summaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = ["Series", "AxisSpec", "emit_svg"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 64, 16, 28, 48  # margins


@dataclass(frozen=True)
class Series:
    x: np.ndarray
    y: np.ndarray
    kind: str = "line"  # "line" | "scatter"
    label: str = ""

    def __post_init__(self):
        if len(self.x) == 0 or len(self.x) != len(self.y):
            raise ValueError("series must be non-empty with matching lengths")
        if self.kind not in ("line", "scatter"):
            raise ValueError(f"unknown series kind {self.kind!r}")


@dataclass(frozen=True)
class AxisSpec:
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    xscale: str = "linear"  # "linear" | "log"
    yscale: str = "linear"

    def __post_init__(self):
        for s in (self.xscale, self.yscale):
            if s not in ("linear", "log"):
                raise ValueError(f"unknown axis scale {s!r}")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _transform(vals: np.ndarray, scale: str):
    if scale == "log":
        keep = vals > 0.0
        return np.log10(vals, where=keep, out=np.full_like(vals, np.nan)), keep
    return vals.astype(np.float64), np.ones(len(vals), dtype=bool)


def _ticks(lo: float, hi: float, scale: str):
    if scale == "log":
        t0, t1 = math.floor(lo), math.ceil(hi)
        return [(float(t), f"1e{t}") for t in range(int(t0), int(t1) + 1)]
    span = hi - lo
    if span <= 0:
        return [(lo, f"{lo:g}")]
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * max(1.0, abs(hi)):
        out.append((t, f"{t:g}"))
        t += step
    return out


def emit_svg(path: str, series: Sequence[Series], axes: AxisSpec) -> int:
    """Write a standalone SVG; returns the count of points dropped on log
    axes (zero on purely linear plots)."""
    if not series:
        raise ValueError("no series to plot")
    dropped = 0
    txs, tys, keeps = [], [], []
    for s in series:
        x = np.asarray(s.x, dtype=np.float64)
        y = np.asarray(s.y, dtype=np.float64)
        tx, kx = _transform(x, axes.xscale)
        ty, ky = _transform(y, axes.yscale)
        keep = kx & ky & np.isfinite(tx) & np.isfinite(ty)
        dropped += int(len(x) - keep.sum())
        txs.append(tx)
        tys.append(ty)
        keeps.append(keep)
    allx = np.concatenate([t[k] for t, k in zip(txs, keeps)])
    ally = np.concatenate([t[k] for t, k in zip(tys, keeps)])
    if allx.size == 0:
        raise ValueError("all points dropped by log-scale filtering")
    xlo, xhi = float(allx.min()), float(allx.max())
    ylo, yhi = float(ally.min()), float(ally.max())
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(v):
        return _ML + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return _MT + ph - (v - ylo) / (yhi - ylo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="black" stroke-width="1"/>',
    ]
    if axes.title:
        parts.append(
            f'<text x="{_W // 2}" y="18" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{axes.title}</text>'
        )
    for tv, lab in _ticks(xlo, xhi, axes.xscale):
        if not (xlo - 1e-12 <= tv <= xhi + 1e-12):
            continue
        X = _fmt(px(tv))
        parts.append(f'<line x1="{X}" y1="{_MT + ph}" x2="{X}" '
                     f'y2="{_MT + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{X}" y="{_MT + ph + 18}" text-anchor="middle" '
                     f'font-family="monospace" font-size="11">{lab}</text>')
    for tv, lab in _ticks(ylo, yhi, axes.yscale):
        if not (ylo - 1e-12 <= tv <= yhi + 1e-12):
            continue
        Y = _fmt(py(tv))
        parts.append(f'<line x1="{_ML - 5}" y1="{Y}" x2="{_ML}" y2="{Y}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{Y}" text-anchor="end" '
                     f'dominant-baseline="middle" font-family="monospace" '
                     f'font-size="11">{lab}</text>')
    if axes.xlabel:
        parts.append(f'<text x="{_ML + pw // 2}" y="{_H - 10}" '
                     f'text-anchor="middle" font-family="monospace" '
                     f'font-size="12">{axes.xlabel}</text>')
    if axes.ylabel:
        parts.append(f'<text x="16" y="{_MT + ph // 2}" text-anchor="middle" '
                     f'font-family="monospace" font-size="12" '
                     f'transform="rotate(-90 16 {_MT + ph // 2})">{axes.ylabel}</text>')
    for k, (s, tx, ty, keep) in enumerate(zip(series, txs, tys, keeps)):
        color = _PALETTE[k % len(_PALETTE)]
        xs = tx[keep]
        ys = ty[keep]
        if s.kind == "line":
            pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(xs, ys))
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        else:
            for a, b in zip(xs, ys):
                parts.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" '
                             f'r="1.6" fill="{color}" fill-opacity="0.55"/>')
        if s.label:
            ly = _MT + 16 + 16 * k
            parts.append(f'<line x1="{_ML + pw - 104}" y1="{ly - 4}" '
                         f'x2="{_ML + pw - 88}" y2="{ly - 4}" stroke="{color}" '
                         f'stroke-width="3"/>')
            parts.append(f'<text x="{_ML + pw - 82}" y="{ly}" '
                         f'font-family="monospace" font-size="11">{s.label}</text>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
    return dropped
