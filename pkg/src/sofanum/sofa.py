"""Caps, niches, monotone sofas, and the sofa area functional.

A cap is a convex body tangent to all four sides of the rotation
parallelogram with edge normals confined to J_omega plus the two bottom
normals. The niche is the fan-clipped union of the inner-corner quadrants;
a monotone sofa is a cap minus its niche.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .convex_core import (
    TAU,
    AngleGrid,
    AngularMeasure,
    ConvexPolygon,
    SupportSamples,
    norm_angle,
    polygon_area,
    support_from_polygon,
    support_of_polygon,
    surface_measure,
    u_vec,
)
from .hallway import Fan, clip_halfplane, shoelace


class CapError(ValueError):
    """A shape fails one of the two cap conditions."""

    def __init__(self, condition: int, message: str):
        self.condition = condition
        super().__init__(message)


@dataclass(frozen=True)
class Cap:
    """Validated cap: polygon plus rotation angle (grid optional)."""

    omega: float
    polygon: ConvexPolygon
    grid: AngleGrid | None = None

    @cached_property
    def support(self) -> SupportSamples:
        if self.grid is not None:
            return self.grid.support_samples(self.polygon)
        angles = np.sort(norm_angle(self.polygon.edge_normals))
        return support_from_polygon(self.polygon, self.omega, angles)

    @cached_property
    def measure(self) -> AngularMeasure:
        return surface_measure(self.polygon)

    @property
    def area(self) -> float:
        return polygon_area(self.polygon)

    @property
    def fan(self) -> Fan:
        return Fan(self.omega)

    def support_at(self, t):
        return support_of_polygon(self.polygon, t)

    def contains(self, pts, tol: float = 1e-9):
        """Point membership via the tangency half-planes of every edge."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        phi = self.polygon.edge_normals
        p = np.asarray(support_of_polygon(self.polygon, phi))
        ok = np.all(pts @ u_vec(phi).T <= p[None, :] + tol, axis=1)
        return ok if ok.size > 1 else bool(ok[0])


def validate_cap(shape, omega: float, tol: float = 1e-9, grid: AngleGrid | None = None) -> Cap:
    """Check the two cap conditions and wrap the shape as a Cap.

    Condition 1: tangency p(omega) = p(pi/2) = 1 and p(pi+omega) = p(3pi/2) = 0.
    Condition 2: every edge normal lies in J_omega u {pi+omega, 3pi/2}.
    """
    if isinstance(shape, SupportSamples):
        poly = shape.as_polygon()
    elif isinstance(shape, ConvexPolygon):
        poly = shape
    elif isinstance(shape, Cap):
        poly = shape.polygon
    else:
        poly = ConvexPolygon(np.asarray(shape, dtype=float))

    checks = [
        (omega, 1.0), (math.pi / 2, 1.0),
        (math.pi + omega, 0.0), (1.5 * math.pi, 0.0),
    ]
    for angle, target in checks:
        got = float(support_of_polygon(poly, angle))
        if abs(got - target) > tol:
            raise CapError(1, f"support at angle {angle:.6f} is {got:.3g}, expected {target}")

    lo2 = math.pi / 2
    for phi in poly.edge_normals:
        t = norm_angle(phi)
        in_arc1 = -tol <= t <= omega + tol
        in_arc2 = lo2 - tol <= t <= omega + lo2 + tol
        bottom = (
            abs(math.remainder(t - (math.pi + omega), TAU)) <= tol
            or abs(math.remainder(t - 1.5 * math.pi, TAU)) <= tol
        )
        if not (in_arc1 or in_arc2 or bottom):
            raise CapError(2, f"edge normal {t:.6f} outside J_omega and bottom normals")
    return Cap(omega=omega, polygon=poly, grid=grid)


# ---------------------------------------------------------------------------
# niche via vertical-slab envelope scan

@dataclass(frozen=True)
class NicheRegion:
    """Column-sampled niche: abscissae with lower/upper heights and area."""

    xs: np.ndarray
    y_lower: np.ndarray
    y_upper: np.ndarray
    area: float

    def to_csv(self) -> str:
        lines = ["x,y_lower,y_upper"]
        lines += [f"{x:.12g},{lo:.12g},{hi:.12g}"
                  for x, lo, hi in zip(self.xs, self.y_lower, self.y_upper)]
        return "\n".join(lines) + "\n"


def _quadrant_ceilings(cap: Cap, ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Pointwise max over t of the inner-quadrant ceiling per column.

    Each quadrant meets a vertical line in a downward ray, so the union's
    ceiling is the running maximum of min(b-line height, d-line height),
    with near-axis walls degenerating to pure column admission tests.
    """
    p1 = np.asarray(cap.support_at(ts))
    p2 = np.asarray(cap.support_at(ts + math.pi / 2))
    ceil = np.full(xs.shape, -np.inf)
    for pt, pt2, t in zip(p1, p2, ts):
        st, ct = math.sin(t), math.cos(t)
        if st > 1e-13:
            c1 = (pt - 1.0 - xs * ct) / st
        else:
            c1 = np.where(pt - 1.0 - xs * ct > 0, np.inf, -np.inf)
        if ct > 1e-13:
            c2 = (pt2 - 1.0 + xs * st) / ct
        else:
            c2 = np.where(pt2 - 1.0 + xs * st > 0, np.inf, -np.inf)
        np.maximum(ceil, np.minimum(c1, c2), out=ceil)
    return ceil


def niche(cap: Cap, t_samples: int = 1024, x_samples: int = 1024) -> NicheRegion:
    """Area of the fan-clipped union of inner quadrants by slab scan."""
    if t_samples < 2 or x_samples < 2:
        raise ValueError("need at least two samples per direction")
    omega = cap.omega
    ts = (np.arange(t_samples) + 0.5) * (omega / t_samples)
    # columns cover every wedge: the W endpoints sit right of -p(pi) and left
    # of p(0), the Z endpoints within p(omega + pi/2) along the slanted edge
    p0 = float(cap.support_at(0.0))
    ppi = float(cap.support_at(math.pi))
    pslant = float(cap.support_at(omega + math.pi / 2))
    x_lo = -max(ppi, pslant * math.sin(omega))
    x_hi = p0
    edges = np.linspace(x_lo, x_hi, x_samples + 1)
    xs = 0.5 * (edges[:-1] + edges[1:])
    dx = (x_hi - x_lo) / x_samples
    ceil = _quadrant_ceilings(cap, ts, xs)
    lower = cap.fan.lower_height(xs)
    heights = np.maximum(0.0, ceil - lower)
    area = float(heights.sum() * dx)
    return NicheRegion(xs=xs, y_lower=lower, y_upper=lower + heights, area=area)


def niche_contained(cap: Cap, t_samples: int = 1024) -> bool:
    """True iff every sampled inner corner is outside the open fan or in the cap."""
    path = _rotation_path(cap, t_samples)
    strict_inside = cap.fan.contains(path, strict=True)
    inside_cap = cap.contains(path)
    return bool(np.all(~np.atleast_1d(strict_inside) | np.atleast_1d(inside_cap)))


def _rotation_path(cap: Cap, m: int) -> np.ndarray:
    from .hallway import rotation_path
    return rotation_path(cap, m)


@dataclass(frozen=True)
class SofaShape:
    """Cap, its niche, and the resulting sofa area."""

    cap: Cap
    niche: NicheRegion
    area: float
    contained: bool


def build_sofa(cap: Cap, t_samples: int = 2048, x_samples: int = 2048) -> SofaShape:
    region = niche(cap, t_samples, x_samples)
    contained = niche_contained(cap, t_samples)
    return SofaShape(cap=cap, niche=region, area=cap.area - region.area, contained=contained)


def sofa_area(cap: Cap, t_samples: int = 2048, x_samples: int = 2048) -> float:
    """|K| - |niche|; flags caps whose niche escapes (still returns the value)."""
    shape = build_sofa(cap, t_samples, x_samples)
    if not shape.contained:
        warnings.warn("niche is not contained in the cap; value is not a sofa area",
                      stacklevel=2)
    return shape.area


# ---------------------------------------------------------------------------
# monotonization

def monotonize(p: SupportSamples, t_samples: int | None = None,
               niche_samples: int = 2048) -> SofaShape:
    """Monotone sofa from support samples in standard position.

    The cap is the half-plane intersection of the parallelogram with every
    sampled outer quadrant, which lower-convexifies the supports to the
    largest valid cap below p; the sofa is that cap minus its niche.
    """
    omega = p.omega
    try:
        top_ok = (abs(p.value_at(omega) - 1.0) <= 1e-9
                  and abs(p.value_at(math.pi / 2) - 1.0) <= 1e-9)
    except KeyError as exc:
        raise ValueError("grid does not resolve the standard-position angles") from exc
    if not top_ok:
        raise ValueError("supports not in standard position: p(omega) = p(pi/2) = 1")

    scale = 2.0 + float(np.abs(p.values).max())
    box = np.array([[-scale, -scale], [scale, -scale], [scale, scale], [-scale, scale]])
    pts = clip_halfplane(box, math.pi + omega, 0.0)
    pts = clip_halfplane(pts, 1.5 * math.pi, 0.0)
    mask = (p.grid <= omega + 1e-12) | (
        (p.grid >= math.pi / 2 - 1e-12) & (p.grid <= omega + math.pi / 2 + 1e-12)
    )
    for t, h in zip(p.grid[mask], p.values[mask]):
        pts = clip_halfplane(pts, t, h)
        if pts.shape[0] == 0:
            raise ValueError("support samples clip to an empty region")
    if shoelace(pts) < 0:
        pts = pts[::-1]
    cap = validate_cap(ConvexPolygon(pts), omega)
    return build_sofa(cap, t_samples or 2048, niche_samples)


# ---------------------------------------------------------------------------
# injectivity of the rotation path

def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    """Proper-crossing test for segment batches (shared endpoints excluded)."""
    d = a1 - a0
    e = b1 - b0
    denom = d[:, 0] * e[:, 1] - d[:, 1] * e[:, 0]
    f = b0 - a0
    s = f[:, 0] * e[:, 1] - f[:, 1] * e[:, 0]
    t = f[:, 0] * d[:, 1] - f[:, 1] * d[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = s / denom
        t = t / denom
    eps = 1e-12
    return (np.abs(denom) > 0) & (s > eps) & (s < 1 - eps) & (t > eps) & (t < 1 - eps)


def injectivity_check(path: np.ndarray, fan: Fan, tol: float = 1e-9) -> bool:
    """Path stays on the fan and revisits no point.

    Checks (a) both fan inequalities within tol for every sample and (b) no
    proper crossing between any two path segments, plus no coincident
    non-adjacent samples (catches constant or back-tracking paths).
    """
    path = np.asarray(path, dtype=float)
    if not np.all(np.atleast_1d(fan.contains(path, tol=tol))):
        return False
    m = path.shape[0]
    span = max(1.0, float(np.abs(path).max()))
    # coincident near-neighbours catch constant or back-tracking paths;
    # matching endpoints catch closed loops that crossing tests miss
    d2 = np.linalg.norm(path[2:] - path[:-2], axis=1)
    if np.any(d2 <= 1e-12 * span):
        return False
    if np.linalg.norm(path[-1] - path[0]) <= 1e-12 * span:
        return False
    a0, a1 = path[:-1], path[1:]
    for i in range(m - 1):
        j0 = i + 2
        if j0 >= m - 1:
            break
        cross = _segments_cross(
            np.repeat(path[i][None, :], m - 1 - j0, axis=0),
            np.repeat(path[i + 1][None, :], m - 1 - j0, axis=0),
            a0[j0:], a1[j0:],
        )
        if np.any(cross):
            return False
    return True


# ---------------------------------------------------------------------------
# polygonal intersection bound (strip ^ rotated hallways)

def _strip_quadrant(thetas, offsets) -> np.ndarray:
    """Convex part: horizontal strip clipped by every outer quadrant."""
    reach = 4.0 + float(np.abs(offsets).max()) if len(offsets) else 4.0
    span = reach / min(min(math.sin(t), math.cos(t)) for t in thetas)
    pts = np.array([[-span, 0.0], [span, 0.0], [span, 1.0], [-span, 1.0]])
    for t, (ha, hc) in zip(thetas, offsets):
        pts = clip_halfplane(pts, t, ha)
        pts = clip_halfplane(pts, t + math.pi / 2, hc)
        if pts.shape[0] == 0:
            break
    return pts


def _holes_area(pts: np.ndarray, thetas, offsets) -> float:
    """Area of the union of inner quadrants inside pts, by inclusion-exclusion."""
    k = len(thetas)
    total = 0.0
    for mask in range(1, 1 << k):
        piece = pts
        for i in range(k):
            if mask >> i & 1:
                t, (ha, hc) = thetas[i], offsets[i]
                piece = clip_halfplane(piece, t, ha - 1.0)
                piece = clip_halfplane(piece, t + math.pi / 2, hc - 1.0)
                if piece.shape[0] == 0:
                    break
        sign = -1.0 if bin(mask).count("1") % 2 == 0 else 1.0
        total += sign * shoelace(piece)
    return total


def _intersection_area(thetas, offsets) -> float:
    pts = _strip_quadrant(thetas, offsets)
    if pts.shape[0] < 3:
        return 0.0
    return shoelace(pts) - _holes_area(pts, thetas, offsets)


def polygonal_bound(thetas, step: float = 0.05, refine_steps: int = 60) -> float:
    """Max area of strip ^ rotated hallways over hallway translations.

    Grid search over the wall offsets followed by coordinate-wise
    golden-section refinement. Exact polygon clipping throughout.
    """
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise ValueError("need at least one hallway angle")
    if not all(0.0 < t < math.pi / 2 for t in thetas):
        raise ValueError("hallway angles must lie in (0, pi/2)")

    k = len(thetas)
    grid = np.arange(0.2, 3.0 + step, step)

    def area_of(vec) -> float:
        offsets = [(vec[2 * i], vec[2 * i + 1]) for i in range(k)]
        return _intersection_area(thetas, offsets)

    if k == 1:
        best, best_vec = -np.inf, None
        for ha in grid:
            for hc in grid:
                a = _intersection_area(thetas, [(ha, hc)])
                if a > best:
                    best, best_vec = a, np.array([ha, hc])
        x = best_vec
    else:
        rng = np.random.default_rng(0)
        x = np.full(2 * k, 1.5)
        best = area_of(x)
        for _ in range(400):
            cand = rng.uniform(0.2, 3.0, size=2 * k)
            a = area_of(cand)
            if a > best:
                best, x = a, cand

    # coordinate-wise golden-section polish
    gold = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(refine_steps):
        for i in range(x.size):
            lo, hi = x[i] - step, x[i] + step
            a, b = hi - gold * (hi - lo), lo + gold * (hi - lo)
            xa, xb = x.copy(), x.copy()
            xa[i], xb[i] = a, b
            fa, fb = area_of(xa), area_of(xb)
            for _ in range(24):
                if fa >= fb:
                    hi, b, fb = b, a, fa
                    a = hi - gold * (hi - lo)
                    xa[i] = a
                    fa = area_of(xa)
                else:
                    lo, a, fa = a, b, fb
                    b = lo + gold * (hi - lo)
                    xb[i] = b
                    fb = area_of(xb)
            x[i] = 0.5 * (lo + hi)
        step *= 0.5
    return max(best, area_of(x))
