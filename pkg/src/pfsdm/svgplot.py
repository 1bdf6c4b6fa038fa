"""Hand-rolled SVG line and scatter charts (no plotting framework).

Output is deterministic text: fixed viewport, fixed palette, '%.6g'
coordinates. Enough for the experiment figures, nothing more.
"""

from __future__ import annotations

import math

from .serialize import write_text_atomic

WIDTH, HEIGHT = 720, 480
MARGIN = 60

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2")


def _coord(v: float) -> str:
    return f"{v:.6g}"


def _axis_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


class _Canvas:
    def __init__(self, title: str, x_label: str, y_label: str, x_range, y_range):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        ]
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0
        self._frame(x_label, y_label)

    def x_pix(self, x: float) -> float:
        return MARGIN + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - 2 * MARGIN)

    def y_pix(self, y: float) -> float:
        return HEIGHT - MARGIN - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - 2 * MARGIN)

    def _frame(self, x_label: str, y_label: str):
        x0, y0 = MARGIN, HEIGHT - MARGIN
        x1, y1 = WIDTH - MARGIN, MARGIN
        self.parts.append(
            f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
            'fill="none" stroke="black"/>'
        )
        for t in _axis_ticks(self.x_lo, self.x_hi):
            px = self.x_pix(t)
            self.parts.append(f'<line x1="{_coord(px)}" y1="{y0}" x2="{_coord(px)}" y2="{y0 + 5}" stroke="black"/>')
            self.parts.append(
                f'<text x="{_coord(px)}" y="{y0 + 20}" text-anchor="middle" font-size="11">{t:.3g}</text>'
            )
        for t in _axis_ticks(self.y_lo, self.y_hi):
            py = self.y_pix(t)
            self.parts.append(f'<line x1="{x0 - 5}" y1="{_coord(py)}" x2="{x0}" y2="{_coord(py)}" stroke="black"/>')
            self.parts.append(
                f'<text x="{x0 - 8}" y="{_coord(py + 4)}" text-anchor="end" font-size="11">{t:.3g}</text>'
            )
        self.parts.append(
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 14}" text-anchor="middle" font-size="13">{x_label}</text>'
        )
        self.parts.append(
            f'<text x="18" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 18 {HEIGHT / 2})">{y_label}</text>'
        )

    def legend(self, labels):
        for i, label in enumerate(labels):
            color = PALETTE[i % len(PALETTE)]
            y = MARGIN + 16 + 16 * i
            x = WIDTH - MARGIN - 150
            self.parts.append(f'<rect x="{x}" y="{y - 9}" width="10" height="10" fill="{color}"/>')
            self.parts.append(f'<text x="{x + 15}" y="{y}" font-size="12">{label}</text>')

    def done(self) -> str:
        self.parts.append("</svg>")
        return "\n".join(self.parts) + "\n"


def line_chart(path, x, series, title="", x_label="", y_label=""):
    """Write a multi-series line chart; series is a list of (label, y-array)."""
    xs = list(map(float, x))
    lo = min(min(map(float, ys)) for _, ys in series)
    hi = max(max(map(float, ys)) for _, ys in series)
    if math.isclose(lo, hi):
        lo, hi = lo - 1.0, hi + 1.0
    canvas = _Canvas(title, x_label, y_label, (min(xs), max(xs)), (lo, hi))
    for i, (label, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_coord(canvas.x_pix(a))},{_coord(canvas.y_pix(float(b)))}" for a, b in zip(xs, ys))
        canvas.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    canvas.legend([label for label, _ in series])
    write_text_atomic(path, canvas.done())


def scatter_chart(path, points, labels, title="", x_label="", y_label=""):
    """Write a scatter chart; ``labels`` assigns each point to a legend class."""
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    pad_x = 0.05 * (max(xs) - min(xs) or 1.0)
    pad_y = 0.05 * (max(ys) - min(ys) or 1.0)
    canvas = _Canvas(
        title, x_label, y_label, (min(xs) - pad_x, max(xs) + pad_x), (min(ys) - pad_y, max(ys) + pad_y)
    )
    classes = sorted(set(labels))
    color_of = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(classes)}
    for (x, y), label in zip(points, labels):
        canvas.parts.append(
            f'<circle cx="{_coord(canvas.x_pix(float(x)))}" cy="{_coord(canvas.y_pix(float(y)))}" '
            f'r="4" fill="{color_of[label]}" fill-opacity="0.8"/>'
        )
    canvas.legend(classes)
    write_text_atomic(path, canvas.done())
