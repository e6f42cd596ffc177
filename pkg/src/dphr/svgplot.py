"""Dependency-free SVG line plots for run telemetry.

Fixed-viewbox polyline rendering: enough for eyeballing loss and
coefficient trajectories without pulling in a plotting stack.
"""

from __future__ import annotations

from pathlib import Path

WIDTH, HEIGHT = 640, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 30, 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_line_plot(
    series: dict[str, list[float]],
    title: str,
    y_label: str,
    x_label: str = "iteration",
) -> str:
    """Render named series as one SVG document, one polyline each."""
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    xs_max = max((len(v) - 1 for v in series.values() if v), default=1) or 1
    flat = [y for v in series.values() for y in v]
    y_lo, y_hi = (min(flat), max(flat)) if flat else (0.0, 1.0)
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def sx(i: int) -> float:
        return MARGIN_L + pw * i / xs_max

    def sy(y: float) -> float:
        return MARGIN_T + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        # Axes.
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 8}" text-anchor="middle">{x_label}</text>',
        f'<text x="14" y="{MARGIN_T + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {MARGIN_T + ph / 2})">{y_label}</text>',
        f'<text x="{MARGIN_L - 6}" y="{sy(y_lo) + 4}" text-anchor="end">{_fmt(y_lo)}</text>',
        f'<text x="{MARGIN_L - 6}" y="{sy(y_hi) + 4}" text-anchor="end">{_fmt(y_hi)}</text>',
        f'<text x="{MARGIN_L}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">0</text>',
        f'<text x="{WIDTH - MARGIN_R}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">{xs_max}</text>',
    ]

    for slot, (name, values) in enumerate(series.items()):
        color = PALETTE[slot % len(PALETTE)]
        if values:
            points = " ".join(f"{sx(i):.2f},{sy(y):.2f}" for i, y in enumerate(values))
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
            )
        ly = MARGIN_T + 14 * slot
        parts.append(
            f'<line x1="{WIDTH - MARGIN_R - 110}" y1="{ly}" x2="{WIDTH - MARGIN_R - 90}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{WIDTH - MARGIN_R - 84}" y="{ly + 4}">{name}</text>')

    parts.append("</svg>")
    return "\n".join(parts)


def write_line_plot(path: str | Path, series: dict[str, list[float]], title: str, y_label: str) -> None:
    Path(path).write_text(render_line_plot(series, title, y_label))
