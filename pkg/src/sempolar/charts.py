"""Minimal deterministic SVG line charts (no plotting dependency)."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f6fb2", "#c23b22", "#3a9d5d", "#8d5fb0", "#b08f26")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart_svg(
    title: str,
    x_labels: list[str],
    series: dict[str, list[float]],
    *,
    width: int = 720,
    height: int = 400,
) -> str:
    """Well-formed standalone SVG with one polyline per series."""
    margin_l, margin_r, margin_t, margin_b = 60, 20, 40, 50
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b

    all_vals = [v for vals in series.values() for v in vals]
    lo = min(all_vals) if all_vals else 0.0
    hi = max(all_vals) if all_vals else 1.0
    if hi == lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.05 * span
    n = max(len(x_labels), 2)

    def sx(i: int) -> float:
        return margin_l + plot_w * i / (n - 1)

    def sy(v: float) -> float:
        return margin_t + plot_h * (1.0 - (v - lo) / (hi - lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{escape(title)}</text>',
        # axes
        f'<line x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
        f'y2="{margin_t + plot_h}" stroke="black"/>',
        f'<line x1="{margin_l}" y1="{margin_t + plot_h}" x2="{margin_l + plot_w}" '
        f'y2="{margin_t + plot_h}" stroke="black"/>',
    ]
    for j in range(5):
        v = lo + (hi - lo) * j / 4
        y = sy(v)
        parts.append(
            f'<text x="{margin_l - 6}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif">{v:.3f}</text>'
        )
        parts.append(
            f'<line x1="{margin_l}" y1="{_fmt(y)}" x2="{margin_l + plot_w}" '
            f'y2="{_fmt(y)}" stroke="#dddddd"/>'
        )
    step = max(1, (len(x_labels) + 9) // 10)
    for i, label in enumerate(x_labels):
        if i % step:
            continue
        parts.append(
            f'<text x="{_fmt(sx(i))}" y="{margin_t + plot_h + 18}" text-anchor="middle" '
            f'font-size="10" font-family="sans-serif">{escape(label)}</text>'
        )
    for idx, (name, vals) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(i))},{_fmt(sy(v))}" for i, v in enumerate(vals))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{margin_l + 8}" y="{margin_t + 14 + 14 * idx}" font-size="11" '
            f'font-family="sans-serif" fill="{color}">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_chart(path: str | Path, title: str, x_labels: list[str],
                     series: dict[str, list[float]], **kwargs) -> None:
    Path(path).write_text(line_chart_svg(title, x_labels, series, **kwargs), encoding="utf-8")
