"""Minimal fixed-size SVG 1.1 line plots.

Each file starts with comment lines holding the metadata needed to
regenerate it (spec, grid, command line).
"""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PANEL = 360
MARGIN = 40
COLORS = ["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#566573"]


def _fmt(x):
    return f"{x:.2f}"


def _limits(series, pad=0.05):
    xs = np.concatenate([np.asarray(s)[:, 0] for s in series if len(s)]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s)[:, 1] for s in series if len(s)]) if series else np.zeros(1)
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1
    dx, dy = (x1 - x0) * pad, (y1 - y0) * pad
    return (x0 - dx, x1 + dx), (y0 - dy, y1 + dy)


def _panel(series, title, xlabel, ylabel, ox, xlim=None, ylim=None, equal=False):
    if xlim is None or ylim is None:
        auto_x, auto_y = _limits(series)
        xlim = xlim or auto_x
        ylim = ylim or auto_y
    if equal:
        half = max(xlim[1] - xlim[0], ylim[1] - ylim[0]) / 2
        cx, cy = sum(xlim) / 2, sum(ylim) / 2
        xlim, ylim = (cx - half, cx + half), (cy - half, cy + half)
    w = PANEL - 2 * MARGIN

    def sx(x):
        return ox + MARGIN + (x - xlim[0]) / (xlim[1] - xlim[0]) * w

    def sy(y):
        return MARGIN + (ylim[1] - y) / (ylim[1] - ylim[0]) * w

    parts = [
        f'<rect x="{ox + MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="#000" stroke-width="0.8"/>',
        f'<text x="{ox + PANEL / 2}" y="{MARGIN - 12}" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{ox + PANEL / 2}" y="{PANEL - 8}" text-anchor="middle" font-size="11">{escape(xlabel)}</text>',
        f'<text x="{ox + 12}" y="{PANEL / 2}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 {ox + 12} {PANEL / 2})">{escape(ylabel)}</text>',
        f'<text x="{ox + MARGIN}" y="{PANEL - MARGIN + 14}" font-size="9">{xlim[0]:.3g}</text>',
        f'<text x="{ox + PANEL - MARGIN}" y="{PANEL - MARGIN + 14}" font-size="9" text-anchor="end">{xlim[1]:.3g}</text>',
        f'<text x="{ox + MARGIN - 3}" y="{PANEL - MARGIN}" font-size="9" text-anchor="end">{ylim[0]:.3g}</text>',
        f'<text x="{ox + MARGIN - 3}" y="{MARGIN + 8}" font-size="9" text-anchor="end">{ylim[1]:.3g}</text>',
    ]
    for k, s in enumerate(series):
        s = np.asarray(s)
        if len(s) < 2:
            continue
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in s if math.isfinite(x) and math.isfinite(y))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{COLORS[k % len(COLORS)]}" stroke-width="1"/>'
        )
    return parts


def render(panels: Sequence[dict], metadata: dict) -> str:
    """panels: dicts with keys series, title, xlabel, ylabel and optional xlim, ylim, equal."""
    width, height = PANEL * len(panels), PANEL
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    for key in sorted(metadata):
        text = str(metadata[key]).replace("--", "- -")
        lines.append(f"<!-- {key}: {text} -->")
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    lines.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#fff"/>')
    for k, p in enumerate(panels):
        lines.extend(
            _panel(
                p["series"], p.get("title", ""), p.get("xlabel", ""), p.get("ylabel", ""),
                k * PANEL, p.get("xlim"), p.get("ylim"), p.get("equal", False),
            )
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def trace_panels(trace):
    """r1-theta1, unrolled torus theta1-theta2, and the disc view z2."""
    return [
        {"series": [np.stack([trace.theta1_lift, trace.r1], -1)], "title": "r1 against theta1",
         "xlabel": "theta1 (lift)", "ylabel": "r1"},
        {"series": [np.stack([trace.theta1_lift, trace.theta2_lift], -1)], "title": "unrolled torus",
         "xlabel": "theta1 (lift)", "ylabel": "theta2 (lift)"},
        {"series": [np.stack([trace.z2.real, trace.z2.imag], -1)], "title": "disc view",
         "xlabel": "Re z2", "ylabel": "Im z2", "xlim": (-1, 1), "ylim": (-1, 1), "equal": True},
    ]
