"""Minimal dependency-free SVG charts (polylines and bars)."""

from __future__ import annotations

from typing import Sequence

_W, _H = 720, 420
_ML, _MR, _MT, _MB = 70, 20, 20, 45


def _scale(values: Sequence[float], lo: float, hi: float, out_lo: float,
           out_hi: float) -> list[float]:
    span = hi - lo if hi > lo else 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def _frame(title: str, x_label: str, y_label: str, x_lo, x_hi, y_lo, y_hi):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="#999"/>',
        f'<text x="{_W / 2}" y="{_H - 8}" text-anchor="middle" '
        f'font-size="13">{x_label}</text>',
        f'<text x="16" y="{_H / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_H / 2})">{y_label}</text>',
        f'<text x="{_ML}" y="{_MT - 6}" font-size="13">{title}</text>',
        f'<text x="{_ML - 6}" y="{_H - _MB + 4}" text-anchor="end" '
        f'font-size="11">{y_lo:.4g}</text>',
        f'<text x="{_ML - 6}" y="{_MT + 10}" text-anchor="end" '
        f'font-size="11">{y_hi:.4g}</text>',
        f'<text x="{_ML}" y="{_H - _MB + 16}" font-size="11">{x_lo:.4g}</text>',
        f'<text x="{_W - _MR}" y="{_H - _MB + 16}" text-anchor="end" '
        f'font-size="11">{x_hi:.4g}</text>',
    ]
    return parts


def line_chart(xs: Sequence[float], series: dict[str, Sequence[float]],
               title: str = "", x_label: str = "", y_label: str = "",
               ref_lines: dict[str, float] | None = None) -> str:
    ref_lines = ref_lines or {}
    everything = [v for ys in series.values() for v in ys] + list(ref_lines.values())
    y_lo, y_hi = min(everything), max(everything)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = min(xs), max(xs)
    parts = _frame(title, x_label, y_label, x_lo, x_hi, y_lo, y_hi)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    sx = _scale(xs, x_lo, x_hi, _ML, _W - _MR)
    for idx, (name, ys) in enumerate(series.items()):
        sy = _scale(ys, y_lo, y_hi, _H - _MB, _MT)
        points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(sx, sy))
        color = palette[idx % len(palette)]
        parts.append(f'<polyline points="{points}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 4}" y="{_MT + 14 + 14 * idx}" '
                     f'text-anchor="end" font-size="12" '
                     f'fill="{color}">{name}</text>')
    for name, level in ref_lines.items():
        y = _scale([level], y_lo, y_hi, _H - _MB, _MT)[0]
        parts.append(f'<line x1="{_ML}" y1="{y:.2f}" x2="{_W - _MR}" '
                     f'y2="{y:.2f}" stroke="#555" stroke-dasharray="6 4"/>')
        parts.append(f'<text x="{_ML + 4}" y="{y - 4:.2f}" font-size="11" '
                     f'fill="#555">{name} = {level:.6g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(labels: Sequence, values: Sequence[float], errors: Sequence[float],
              title: str = "", x_label: str = "", y_label: str = "") -> str:
    y_lo = min(0.0, min(values))
    y_hi = max(max(v + e for v, e in zip(values, errors)), 0.0)
    if y_lo == y_hi:
        y_hi = y_lo + 1.0
    parts = _frame(title, x_label, y_label, 0, len(values), y_lo, y_hi)
    width = (_W - _ML - _MR) / max(len(values), 1)
    for i, (label, v, e) in enumerate(zip(labels, values, errors)):
        x0 = _ML + i * width + 0.15 * width
        y_val = _scale([v], y_lo, y_hi, _H - _MB, _MT)[0]
        y_zero = _scale([0.0], y_lo, y_hi, _H - _MB, _MT)[0]
        top, bottom = min(y_val, y_zero), max(y_val, y_zero)
        parts.append(f'<rect x="{x0:.2f}" y="{top:.2f}" width="{0.7 * width:.2f}" '
                     f'height="{bottom - top:.2f}" fill="#1f77b4"/>')
        if e:
            xc = x0 + 0.35 * width
            y_up = _scale([v + e], y_lo, y_hi, _H - _MB, _MT)[0]
            y_dn = _scale([v - e], y_lo, y_hi, _H - _MB, _MT)[0]
            parts.append(f'<line x1="{xc:.2f}" y1="{y_up:.2f}" x2="{xc:.2f}" '
                         f'y2="{y_dn:.2f}" stroke="#222"/>')
        parts.append(f'<text x="{x0 + 0.35 * width:.2f}" y="{_H - _MB + 16}" '
                     f'text-anchor="middle" font-size="11">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
