"""Minimal native SVG emitters (no plotting dependency, no timestamps)."""

from __future__ import annotations

import math


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def line_plot(series: list[dict], path: str, width: int = 640, height: int = 420,
              title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False) -> None:
    """Polyline plot; each series is {x: [...], y: [...], label, err: optional}."""
    pad = 56
    xs_all, ys_all = [], []
    for s in series:
        xv = [math.log(v) for v in s["x"]] if logx else list(s["x"])
        xs_all += xv
        ys_all += list(s["y"])
        if "err" in s:
            ys_all += [y + e for y, e in zip(s["y"], s["err"])]
            ys_all += [y - e for y, e in zip(s["y"], s["err"])]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width//2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
             f'<text x="{width//2}" y="{height-8}" text-anchor="middle" font-size="12">{xlabel}</text>',
             f'<text x="14" y="{height//2}" text-anchor="middle" font-size="12" '
             f'transform="rotate(-90 14 {height//2})">{ylabel}</text>',
             f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>']
    for k in range(5):
        xv = x0 + k * (x1 - x0) / 4
        yv = y0 + k * (y1 - y0) / 4
        parts.append(f'<text x="{_fmt(sx(xv))}" y="{height-pad+16}" text-anchor="middle" '
                     f'font-size="10">{xv:.3g}</text>')
        parts.append(f'<text x="{pad-6}" y="{_fmt(sy(yv)+3)}" text-anchor="end" '
                     f'font-size="10">{yv:.3g}</text>')
    for i, s in enumerate(series):
        col = colors[i % len(colors)]
        xv = [math.log(v) for v in s["x"]] if logx else list(s["x"])
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xv, s["y"]))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        if "err" in s:
            for x, y, e in zip(xv, s["y"], s["err"]):
                parts.append(f'<line x1="{_fmt(sx(x))}" y1="{_fmt(sy(y-e))}" '
                             f'x2="{_fmt(sx(x))}" y2="{_fmt(sy(y+e))}" stroke="{col}"/>')
        for x, y in zip(xv, s["y"]):
            parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="2.5" fill="{col}"/>')
        if s.get("label"):
            parts.append(f'<text x="{width-pad}" y="{pad + 14*i}" text-anchor="end" '
                         f'font-size="11" fill="{col}">{s["label"]}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


def heatmap(values: dict, path: str, cell: int = 6, title: str = "") -> None:
    """Sparse site map {(x, y): value} as colored squares."""
    if not values:
        values = {(0, 0): 0.0}
    xs = [s[0] for s in values]
    ys = [s[1] for s in values]
    vmax = max(abs(v) for v in values.values()) or 1.0
    w = (max(xs) - min(xs) + 3) * cell
    h = (max(ys) - min(ys) + 3) * cell + 24
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>',
             f'<text x="{w//2}" y="14" text-anchor="middle" font-size="12">{title}</text>']
    for (x, y), v in sorted(values.items()):
        t = v / vmax
        if t >= 0:
            col = f"rgb({int(255*(1-t))},{int(255*(1-t))},255)"
        else:
            col = f"rgb(255,{int(255*(1+t))},{int(255*(1+t))})"
        px = (x - min(xs) + 1) * cell
        py = (y - min(ys) + 1) * cell + 20
        parts.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{col}"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
