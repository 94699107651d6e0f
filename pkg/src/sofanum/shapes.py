"""Reference shapes used across examples and verification."""

from __future__ import annotations

import math

import numpy as np

from .convex_core import ConvexPolygon, u_vec
from .sofa import Cap, validate_cap


def half_disk_polygon(m: int = 2000) -> ConvexPolygon:
    """Inscribed unit half-disk with vertices on the arc; m even keeps (0, 1)."""
    if m < 2:
        raise ValueError("need at least two arc segments")
    phis = np.linspace(0.0, math.pi, m + 1)
    return ConvexPolygon(u_vec(phis))


def half_disk_cap(m: int = 2000) -> Cap:
    return validate_cap(half_disk_polygon(m), math.pi / 2)


def unit_square() -> ConvexPolygon:
    return ConvexPolygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def unit_square_cap() -> Cap:
    return validate_cap(unit_square(), math.pi / 2)


def wide_box_cap(length: float = 100.0) -> Cap:
    """The over-wide box whose niche escapes the cap."""
    poly = ConvexPolygon([[0.0, 0.0], [length, 0.0], [length, 1.0], [0.0, 1.0]])
    return validate_cap(poly, math.pi / 2)


def square_quarter_circle_cap(m: int = 2000) -> Cap:
    """Unit square with the unit quarter-circle glued to its left side."""
    phis = np.linspace(math.pi / 2, math.pi, m + 1)
    verts = np.vstack([[[1.0, 0.0], [1.0, 1.0]], u_vec(phis)])
    return validate_cap(ConvexPolygon(verts), math.pi / 2)
