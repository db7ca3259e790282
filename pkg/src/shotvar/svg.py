"""Minimal SVG writers: an RSD scatter with its fitted line and a colored
qubit grid. Output is deterministic text (fixed number formatting)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .cltstats import CFit, RsdCurve

FILL = {
    "green": "#2ca02c",
    "yellow": "#f2c200",
    "black": "#222222",
    "red": "#d62728",
    "orange": "#ff7f0e",
}

W, H, PAD = 480, 360, 48


def _f(v: float) -> str:
    return f"{v:.2f}"


def rsd_plot(curve: RsdCurve, fit: CFit | None = None, title: str = "", manifest: str | None = None) -> str:
    xs = [p[0] for p in curve.points] or [2.0, 7.0]
    ys = [p[1] for p in curve.points] or [-1.0, 0.0]
    x0, x1 = math.floor(min(xs)) - 0.5, math.ceil(max(xs)) + 0.5
    if fit is not None:
        ys = ys + [fit.slope * x + fit.c for x in (x0, x1)]
    y0, y1 = math.floor(min(ys)) - 0.5, math.ceil(max(ys)) + 0.5

    def sx(x):
        return PAD + (x - x0) / (x1 - x0) * (W - 2 * PAD)

    def sy(y):
        return H - PAD - (y - y0) / (y1 - y0) * (H - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
    ]
    if manifest:
        out.append(f"<!-- manifest: {escape(manifest)} -->")
    out += [
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}"/>'
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}"/></g>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle" font-size="13">log2 w</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {H / 2})">log2 RSD</text>',
    ]
    if title:
        out.append(f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append('<g id="ticks" font-size="10">')
    for xt in range(math.ceil(x0), math.floor(x1) + 1):
        out.append(f'<text x="{_f(sx(xt))}" y="{H - PAD + 14}" text-anchor="middle">{xt}</text>')
    for yt in range(math.ceil(y0), math.floor(y1) + 1):
        out.append(f'<text x="{PAD - 6}" y="{_f(sy(yt) + 3)}" text-anchor="end">{yt}</text>')
    out.append("</g>")
    if fit is not None:
        out.append(
            f'<line id="fit" x1="{_f(sx(x0))}" y1="{_f(sy(fit.slope * x0 + fit.c))}" '
            f'x2="{_f(sx(x1))}" y2="{_f(sy(fit.slope * x1 + fit.c))}" stroke="#1f77b4" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{W - PAD}" y="{PAD}" text-anchor="end" font-size="12">'
            f"c = {fit.c:.3f}, slope = {fit.slope:.3f}</text>"
        )
    out.append('<g id="points" fill="#d62728">')
    for x, y in curve.points:
        out.append(f'<circle cx="{_f(sx(x))}" cy="{_f(sy(y))}" r="4"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def qubit_grid(cells: list[tuple[str, str]], columns: int = 8, title: str = "",
               manifest: str | None = None) -> str:
    """Grid of labelled squares, one per ``(id, color)``, filled row by row."""
    size, gap = 44, 6
    rows = max(1, math.ceil(len(cells) / columns))
    width = columns * (size + gap) + gap
    top = 30 if title else gap
    height = top + rows * (size + gap)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    if manifest:
        out.append(f"<!-- manifest: {escape(manifest)} -->")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    if title:
        out.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append('<g id="cells" font-size="11" text-anchor="middle">')
    for k, (label, color) in enumerate(cells):
        r, c = divmod(k, columns)
        x, y = gap + c * (size + gap), top + r * (size + gap)
        text_fill = "white" if color == "black" else "black"
        out.append(
            f'<g class="{escape(color)}"><rect x="{x}" y="{y}" width="{size}" height="{size}" '
            f'fill="{FILL.get(color, "#cccccc")}" stroke="black"/>'
            f'<text x="{x + size / 2}" y="{y + size / 2 + 4}" fill="{text_fill}">{escape(label)}</text></g>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
