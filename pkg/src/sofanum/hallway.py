"""Tangent hallways of a cap: poses, arm lengths, rotation paths, wedges."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_core import (
    SupportSamples,
    cross2,
    line_intersection,
    support_of_polygon,
    u_vec,
    v_vec,
    vertex_pair,
)


def _supports(shape, t: float) -> tuple[float, float]:
    """Support values at t and t + pi/2 for samples, polygons, or caps."""
    if isinstance(shape, SupportSamples):
        return shape.value_at(t), shape.value_at(t + math.pi / 2)
    poly = shape.polygon if hasattr(shape, "polygon") else shape
    return (
        float(support_of_polygon(poly, t)),
        float(support_of_polygon(poly, t + math.pi / 2)),
    )


def _omega_of(shape) -> float:
    if hasattr(shape, "omega"):
        return shape.omega
    raise TypeError("shape carries no rotation angle; pass SupportSamples or Cap")


@dataclass(frozen=True)
class HallwayPose:
    """Rotated hallway tangent to a shape: corners plus the four wall lines.

    Walls are (normal angle, offset) records; a and c are the outer walls,
    b and d the inner ones.
    """

    t: float
    x: np.ndarray
    y: np.ndarray
    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    d: tuple[float, float]


@dataclass(frozen=True)
class Fan:
    """Convex cone at the origin between the parallelogram's bottom lines."""

    omega: float

    def contains(self, pts, tol: float = 1e-9, strict: bool = False):
        """Membership test p.u_{pi+omega} <= 0 and p.u_{3pi/2} <= 0."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        s1 = pts @ u_vec(math.pi + self.omega)
        s2 = pts @ u_vec(1.5 * math.pi)
        if strict:
            ok = (s1 < -tol) & (s2 < -tol)
        else:
            ok = (s1 <= tol) & (s2 <= tol)
        return ok if ok.size > 1 else bool(ok[0])

    def lower_height(self, x):
        """Height of the fan's lower boundary above abscissa x."""
        x = np.asarray(x, dtype=float)
        if abs(self.omega - math.pi / 2) <= 1e-12:
            return np.zeros_like(x)
        return np.maximum(0.0, -x * math.cos(self.omega) / math.sin(self.omega))


def tangent_hallway(shape, t: float) -> HallwayPose:
    """Hallway rotated by t with outer walls tangent to the shape."""
    omega = _omega_of(shape)
    if not -1e-12 <= t <= omega + 1e-12:
        raise ValueError(f"hallway angle {t} outside [0, {omega}]")
    p1, p2 = _supports(shape, t)
    x = (p1 - 1.0) * u_vec(t) + (p2 - 1.0) * v_vec(t)
    y = p1 * u_vec(t) + p2 * v_vec(t)
    tq = t + math.pi / 2
    return HallwayPose(
        t=t, x=x, y=y,
        a=(t, p1), b=(t, p1 - 1.0),
        c=(tq, p2), d=(tq, p2 - 1.0),
    )


def arm_lengths(shape, t: float) -> tuple[float, float, float, float]:
    """Arm lengths (g-, g+, h-, h+) of the tangent hallway at angle t.

    g is measured from the contact vertices A(t) along v_t to the outer
    corner, h from C(t) along u_t. One-sided values split exactly where
    the surface measure has an atom.
    """
    poly = shape.polygon if hasattr(shape, "polygon") else shape
    am, ap = vertex_pair(poly, t)
    cm, cp = vertex_pair(poly, t + math.pi / 2)
    vt = v_vec(t)
    ut = u_vec(t)
    gm = float((cm - am) @ vt)
    gp = float((cp - ap) @ vt)
    hm = float((am - cm) @ ut)
    hp = float((ap - cp) @ ut)
    return gm, gp, hm, hp


def arm_lengths_many(shape, ts):
    """Vectorized arm lengths: arrays (g-, g+, h-, h+) over angle batch ts."""
    from .convex_core import vertex_pairs
    poly = shape.polygon if hasattr(shape, "polygon") else shape
    ts = np.asarray(ts, dtype=float)
    am, ap = vertex_pairs(poly, ts)
    cm, cp = vertex_pairs(poly, ts + math.pi / 2)
    vt = v_vec(ts)
    ut = u_vec(ts)
    gm = np.einsum("ij,ij->i", cm - am, vt)
    gp = np.einsum("ij,ij->i", cp - ap, vt)
    hm = np.einsum("ij,ij->i", am - cm, ut)
    hp = np.einsum("ij,ij->i", ap - cp, ut)
    return gm, gp, hm, hp


def rotation_path(shape, m: int) -> np.ndarray:
    """Inner-corner trajectory x(t) at m uniform angles spanning [0, omega]."""
    if m < 2:
        raise ValueError("need at least two path samples")
    omega = _omega_of(shape)
    ts = np.linspace(0.0, omega, m)
    if isinstance(shape, SupportSamples):
        p1 = np.array([shape.value_at(t) for t in ts])
        p2 = np.array([shape.value_at(t + math.pi / 2) for t in ts])
    else:
        poly = shape.polygon if hasattr(shape, "polygon") else shape
        p1 = support_of_polygon(poly, ts)
        p2 = support_of_polygon(poly, ts + math.pi / 2)
    return (p1 - 1.0)[:, None] * u_vec(ts) + (p2 - 1.0)[:, None] * v_vec(ts)


def corner_derivative(shape, t: float, side: str = "+") -> np.ndarray:
    """One-sided derivative of the inner corner from the arm lengths."""
    gm, gp, hm, hp = arm_lengths(shape, t)
    if side == "+":
        g, h = gp, hp
    elif side == "-":
        if t <= 1e-12:
            raise ValueError("left derivative undefined at t = 0")
        g, h = gm, hm
    else:
        raise ValueError("side must be '+' or '-'")
    return -(g - 1.0) * u_vec(t) + (h - 1.0) * v_vec(t)


def clip_halfplane(pts: np.ndarray, t: float, h: float) -> np.ndarray:
    """Clip a CCW polygon (vertex array) against the half-plane p.u_t <= h."""
    if pts.shape[0] == 0:
        return pts
    d = pts @ u_vec(t) - h
    if np.all(d <= 0):
        return pts
    if np.all(d >= 0):
        return pts[:0]
    dn = np.roll(d, -1)
    nxt = np.roll(pts, -1, axis=0)
    crossing = ((d < 0) & (dn > 0)) | ((d > 0) & (dn < 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = d / (d - dn)
    inter = pts + (nxt - pts) * frac[:, None]
    keep = d <= 0
    # interleave kept vertices with edge crossings in traversal order
    keys = np.concatenate([2 * np.nonzero(keep)[0], 2 * np.nonzero(crossing)[0] + 1])
    out = np.vstack([pts[keep], inter[crossing]])
    return out[np.argsort(keys, kind="stable")]


def shoelace(pts: np.ndarray) -> float:
    if pts.shape[0] < 3:
        return 0.0
    return 0.5 * float(np.sum(cross2(pts, np.roll(pts, -1, axis=0))))


@dataclass(frozen=True)
class Wedge:
    """Fan-clipped inner quadrant of the tangent hallway at one angle."""

    t: float
    polygon: np.ndarray  # possibly empty (0, 2) array, CCW
    W: np.ndarray
    Z: np.ndarray
    w: float
    z: float

    @property
    def area(self) -> float:
        return shoelace(self.polygon)


def wedge(shape, t: float) -> Wedge:
    """Wedge T(t) = fan ^ inner quadrant, with the W/Z endpoint records.

    W is the inner b-wall hitting the fan's horizontal bottom line and Z the
    inner d-wall hitting the slanted one; w, z are their signed distances to
    the bottom cap vertices and stay nonnegative for every valid cap.
    """
    omega = _omega_of(shape)
    if not 0.0 < t < omega:
        raise ValueError(f"wedge angle {t} outside (0, {omega})")
    p1, p2 = _supports(shape, t)
    poly = shape.polygon if hasattr(shape, "polygon") else None

    # W = b(t) ^ {y = 0}; Z = d(t) ^ l(omega, 0); both well-posed for t in (0, omega)
    W = line_intersection(1.5 * math.pi, 0.0, t, p1 - 1.0)
    Z = line_intersection(omega, 0.0, t + math.pi / 2, p2 - 1.0)

    w = z = math.nan
    if poly is not None:
        am = vertex_pair(poly, 0.0)[0]
        cp = vertex_pair(poly, omega + math.pi / 2)[1]
        w = float((am - W) @ u_vec(0.0))
        z = float((cp - Z) @ v_vec(omega))

    # polygon by successive half-plane cuts of a generous box
    scale = 2.0 + abs(p1) + abs(p2) + float(np.abs(np.concatenate([W, Z])).max())
    box = np.array([[-scale, -scale], [scale, -scale], [scale, scale], [-scale, scale]])
    pts = clip_halfplane(box, math.pi + omega, 0.0)           # fan side l(omega, 0)
    pts = clip_halfplane(pts, 1.5 * math.pi, 0.0)             # fan side y >= 0
    pts = clip_halfplane(pts, t, p1 - 1.0)                    # inner wall b
    pts = clip_halfplane(pts, t + math.pi / 2, p2 - 1.0)      # inner wall d
    return Wedge(t=t, polygon=pts, W=W, Z=Z, w=w, z=z)
