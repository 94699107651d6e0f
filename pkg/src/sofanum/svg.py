"""Deterministic SVG rendering of caps, niches, paths, and the optimal sofa.

Fixed scale of 100 units per hallway width with the y axis flipped so
figures read the usual way up. Identical inputs yield identical bytes.
"""

from __future__ import annotations

import numpy as np

from .maximizer import S1Curves, s1_curves
from .sofa import Cap, NicheRegion, SofaShape

SCALE = 100.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _pts(points: np.ndarray, ox: float, oy: float) -> str:
    return " ".join(f"{_fmt(ox + SCALE * p[0])},{_fmt(oy - SCALE * p[1])}"
                    for p in np.asarray(points, dtype=float))


def _document(body: list[str], width: float, height: float) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def render_sofa(shape: SofaShape | Cap, path_samples: int = 512,
                s1_overlay: bool = False) -> str:
    """Cap outline, shaded niche band, and the stroked rotation path."""
    from .hallway import rotation_path

    if isinstance(shape, Cap):
        cap, region = shape, None
    else:
        cap, region = shape.cap, shape.niche

    verts = cap.polygon.vertices
    xs = verts[:, 0]
    ys = verts[:, 1]
    margin = 0.2
    x_lo, x_hi = float(xs.min()) - margin, float(xs.max()) + margin
    y_lo, y_hi = min(float(ys.min()), 0.0) - margin, float(ys.max()) + margin
    ox, oy = -SCALE * x_lo, SCALE * y_hi
    width, height = SCALE * (x_hi - x_lo), SCALE * (y_hi - y_lo)

    body = []
    if region is not None and region.area > 1e-12:
        band = np.vstack([
            np.column_stack([region.xs, region.y_lower]),
            np.column_stack([region.xs, region.y_upper])[::-1],
        ])
        body.append(f'<polygon points="{_pts(band, ox, oy)}" '
                    'fill="#d0d8f8" stroke="none"/>')
    body.append(f'<polygon points="{_pts(verts, ox, oy)}" '
                'fill="none" stroke="#202020" stroke-width="1.5"/>')
    path = rotation_path(cap, path_samples)
    body.append(f'<polyline points="{_pts(path, ox, oy)}" '
                'fill="none" stroke="#c03030" stroke-width="1.2"/>')
    if s1_overlay:
        # the overlay curves live in the centered frame, offset (-1, 0)
        curves = s1_curves(max(2, path_samples))
        body.extend(_s1_elements(curves, ox + SCALE, oy, "#3050c0"))
    return _document(body, width, height)


def _s1_elements(curves: S1Curves, ox: float, oy: float, color: str) -> list[str]:
    mirror = curves.gamma * np.array([-1.0, 1.0])
    parts = []
    for arr in (curves.gamma, mirror, curves.corner):
        parts.append(f'<polyline points="{_pts(arr, ox, oy)}" '
                     f'fill="none" stroke="{color}" stroke-width="1.0"/>')
    for p, q in curves.segments:
        parts.append(f'<line x1="{_fmt(ox + SCALE * p[0])}" y1="{_fmt(oy - SCALE * p[1])}" '
                     f'x2="{_fmt(ox + SCALE * q[0])}" y2="{_fmt(oy - SCALE * q[1])}" '
                     f'stroke="{color}" stroke-width="1.0"/>')
    return parts


def render_s1(n: int = 1024) -> str:
    """The optimal sofa's boundary: three curves plus three segments."""
    curves = s1_curves(n)
    margin = 0.2
    x_hi = float(curves.gamma[:, 0].max()) + margin
    ox, oy = SCALE * x_hi, SCALE * (1.0 + margin)
    width = 2 * SCALE * x_hi
    height = SCALE * (1.0 + 2 * margin)
    return _document(_s1_elements(curves, ox, oy, "#202020"), width, height)
