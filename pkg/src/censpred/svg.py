"""Minimal SVG rendering of two-dimensional prediction regions."""

from __future__ import annotations

import numpy as np

from .regions import ORDER_STATISTICS, BandRegion, HalfSpaceRegion

SIZE = 600
MARGIN = 60


class _Axes:
    def __init__(self, xmax: float, ymax: float, xmin: float = 0.0, ymin: float = 0.0):
        self.xmin, self.xmax = xmin, xmax if xmax > xmin else xmin + 1.0
        self.ymin, self.ymax = ymin, ymax if ymax > ymin else ymin + 1.0

    def px(self, x, y):
        span = SIZE - 2 * MARGIN
        u = MARGIN + (np.asarray(x) - self.xmin) / (self.xmax - self.xmin) * span
        v = SIZE - MARGIN - (np.asarray(y) - self.ymin) / (self.ymax - self.ymin) * span
        return u, v

    def points(self, x, y) -> str:
        u, v = self.px(x, y)
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(np.atleast_1d(u), np.atleast_1d(v)))

    def frame(self, xlabel: str, ylabel: str) -> list[str]:
        x0, y0 = self.px(self.xmin, self.ymin)
        x1, y1 = self.px(self.xmax, self.ymax)
        out = [
            f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="black"/>',
            f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" stroke="black"/>',
        ]
        for k in range(5):
            fx = self.xmin + k * (self.xmax - self.xmin) / 4
            fy = self.ymin + k * (self.ymax - self.ymin) / 4
            ux, _ = self.px(fx, self.ymin)
            _, vy = self.px(self.xmin, fy)
            out.append(f'<text x="{ux:.2f}" y="{y0 + 18:.2f}" font-size="11" text-anchor="middle">{fx:.4g}</text>')
            out.append(f'<text x="{x0 - 6:.2f}" y="{vy + 4:.2f}" font-size="11" text-anchor="end">{fy:.4g}</text>')
        out.append(f'<text x="{SIZE / 2:.0f}" y="{SIZE - 15}" font-size="13" text-anchor="middle">{xlabel}</text>')
        out.append(
            f'<text x="15" y="{SIZE / 2:.0f}" font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 15 {SIZE / 2:.0f})">{ylabel}</text>'
        )
        return out


def _document(body: list[str], title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">'
    )
    caption = f'<text x="{SIZE / 2:.0f}" y="25" font-size="14" text-anchor="middle">{title}</text>'
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', caption, *body, "</svg>"]) + "\n"


def band_svg(region: BandRegion, title: str = "") -> str:
    """Filled band with the conditional-mean curve dashed."""
    os_frame = region.frame == ORDER_STATISTICS
    xmin = region.origin if os_frame else 0.0
    ymin = region.origin if os_frame else 0.0
    ymax = float(np.max(region.hi)) * 1.05
    xmax = region.a_hi + 0.05 * (region.a_hi - xmin)
    ax = _Axes(xmax, ymax, xmin, ymin)
    xs = np.concatenate([region.grid, region.grid[::-1]])
    ys = np.concatenate([region.hi, region.lo[::-1]])
    body = ax.frame(*(("x_r", "x_s") if os_frame else ("y1", "y2")))
    body.append(f'<polygon points="{ax.points(xs, ys)}" fill="#9ecae1" stroke="#08519c" stroke-width="1"/>')
    if region.mean_curve is not None:
        body.append(
            f'<polyline points="{ax.points(region.grid, region.mean_curve)}" fill="none" '
            'stroke="black" stroke-dasharray="6,4" stroke-width="1.5"/>'
        )
    return _document(body, title)


def halfspace_svg(region: HalfSpaceRegion, title: str = "") -> str:
    """Triangle ``{z >= 0 : c1 z1 + c2 z2 <= bound}``."""
    if region.dim != 2:
        raise ValueError("SVG rendering is two-dimensional only")
    c1, c2 = region.coefficients
    b = region.bound
    if region.frame == ORDER_STATISTICS:
        o = region.origin
        # vertices of {o <= t1 <= t2, c1 t1 + c2 t2 <= b}
        t_diag = b / (c1 + c2)
        xs = np.array([o, o, t_diag])
        ys = np.array([o, (b - c1 * o) / c2, t_diag])
        ax = _Axes(float(xs.max()) * 1.05, float(ys.max()) * 1.05, o, o)
        labels = ("t1", "t2")
    else:
        xs = np.array([0.0, b / c1, 0.0])
        ys = np.array([0.0, 0.0, b / c2])
        ax = _Axes(float(xs.max()) * 1.1, float(ys.max()) * 1.1)
        labels = ("z1", "z2")
    body = ax.frame(*labels)
    body.append(f'<polygon points="{ax.points(xs, ys)}" fill="#9ecae1" stroke="#08519c" stroke-width="1"/>')
    return _document(body, title)
