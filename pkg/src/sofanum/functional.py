"""Curve area, the concave quadratic upper bound, and boundary measures.

The upper bound subtracts the signed area swept by the inner corner from
the cap area. It is quadratic and concave under Minkowski combination;
its stationarity condition equates the boundary measure (upper-boundary
edge lengths) with the arm-length density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_core import (
    AngleGrid,
    AngularMeasure,
    ConvexPolygon,
    SupportSamples,
    cross2,
    gauss_minkowski,
    minkowski_combine,
    support_of_polygon,
    u_vec,
    v_vec,
    vertex_pairs,
)
from .hallway import arm_lengths_many, rotation_path
from .sofa import Cap, validate_cap


# ---------------------------------------------------------------------------
# curve area functional

def curve_area(points: np.ndarray) -> float:
    """Signed area 1/2 sum p_i x p_{i+1} of a polyline.

    Equals the enclosed area for CCW closed loops; additive under
    concatenation. Closed loops should repeat their first point unless it
    is the origin (segments through the origin contribute nothing).
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    return 0.5 * float(np.sum(cross2(pts[:-1], pts[1:])))


def a1(cap: Cap, m: int = 2048) -> float:
    """Upper bound |K| - I(x_K) with the rotation path sampled at m angles."""
    return cap.area - curve_area(rotation_path(cap, m))


# ---------------------------------------------------------------------------
# boundary measure and the cap <-> measure bijection

def boundary_measure(cap: Cap, tol: float = 1e-7) -> AngularMeasure:
    """Surface measure restricted to J_omega (both bottom atoms removed)."""
    sigma = cap.measure
    omega = cap.omega
    lo2 = math.pi / 2
    keep = ((sigma.angles <= omega + tol) |
            ((sigma.angles >= lo2 - tol) & (sigma.angles <= omega + lo2 + tol)))
    return AngularMeasure(sigma.angles[keep], sigma.weights[keep])


def constraint_integrals(beta: AngularMeasure, omega: float) -> tuple[float, float]:
    """The two tangency integrals of a measure on J_omega."""
    th, w = beta.angles, beta.weights
    in1 = th <= omega + 1e-12
    in2 = th >= math.pi / 2 - 1e-12
    c1 = float(np.sum(np.where(in1, np.cos(th), 0.0) * w))
    c2 = float(np.sum(np.where(in2, np.cos(omega + math.pi / 2 - th), 0.0) * w))
    return c1, c2


def bottom_atoms(beta: AngularMeasure, omega: float) -> AngularMeasure:
    """Extend a J_omega measure by the closing atoms at the bottom normals."""
    if abs(omega - math.pi / 2) <= 1e-12:
        wb = float(np.sum(beta.weights * np.sin(beta.angles)))
        angles = np.array([1.5 * math.pi])
        weights = np.array([wb])
    else:
        closure = beta.weights @ v_vec(beta.angles)
        cols = np.stack([v_vec(1.5 * math.pi), v_vec(math.pi + omega)], axis=1)
        sol = np.linalg.solve(cols, -closure)
        angles = np.array([math.pi + omega, 1.5 * math.pi])
        weights = np.array([sol[1], sol[0]])
    if np.any(weights < -1e-10):
        raise ValueError(f"inconsistent measure: negative bottom atom {weights}")
    return AngularMeasure(
        np.concatenate([beta.angles, angles]),
        np.concatenate([beta.weights, np.maximum(weights, 0.0)]),
    )


def standard_position(poly: ConvexPolygon, omega: float) -> ConvexPolygon:
    """Translate so p(omega) = p(pi/2) = 1.

    For omega = pi/2 the leftover horizontal freedom is fixed by pinning the
    support midpoint along u_0, (p(0) - p(pi))/2, at 1.
    """
    if abs(omega - math.pi / 2) <= 1e-12:
        cy = 1.0 - float(support_of_polygon(poly, math.pi / 2))
        mid = 0.5 * (float(support_of_polygon(poly, 0.0))
                     - float(support_of_polygon(poly, math.pi)))
        return poly.translate([1.0 - mid, cy])
    rows = np.stack([u_vec(omega), v_vec(0.0)])
    rhs = np.array([
        1.0 - float(support_of_polygon(poly, omega)),
        1.0 - float(support_of_polygon(poly, math.pi / 2)),
    ])
    return poly.translate(np.linalg.solve(rows, rhs))


def cap_from_boundary(beta: AngularMeasure, omega: float,
                      grid: AngleGrid | None = None, tol: float = 1e-6) -> Cap:
    """Reconstruct the cap whose boundary measure is beta.

    Checks the two tangency integrals, solves for the bottom atoms, chains
    the edges, and translates into standard position.
    """
    if beta.has_density:
        if grid is None:
            raise ValueError("density measure needs a grid for discretization")
        beta = beta.discretized(grid.delta)
    c1, c2 = constraint_integrals(beta, omega)
    if abs(c1 - 1.0) > tol or abs(c2 - 1.0) > tol:
        raise ValueError(f"measure violates tangency constraints: {c1:.8f}, {c2:.8f}")
    sigma = bottom_atoms(beta, omega)
    poly = standard_position(gauss_minkowski(sigma, tol=max(tol, 1e-7)), omega)
    return validate_cap(poly, omega, tol=max(1e-9, 10 * tol), grid=grid)


# ---------------------------------------------------------------------------
# the arm-length density

@dataclass(frozen=True)
class IotaMeasure:
    """Density h+(t) - 1 on the first arc and g+(t) - 1 on the shifted arc."""

    t_angles: np.ndarray      # angles in [0, omega]
    first: np.ndarray         # i(t) = h+(t) - 1
    second: np.ndarray        # i(t + pi/2) = g+(t) - 1

    def as_measure(self) -> AngularMeasure:
        return AngularMeasure(
            np.zeros(0), np.zeros(0),
            np.concatenate([self.t_angles, self.t_angles + math.pi / 2]),
            np.concatenate([self.first, self.second]),
        )


def iota(cap: Cap, t_angles=None) -> IotaMeasure:
    """Arm-length density of the cap, sampled at cell midpoints by default."""
    if t_angles is None:
        if cap.grid is None:
            raise ValueError("cap has no canonical grid; pass t_angles")
        t_angles = cap.grid.mids1
    t_angles = np.asarray(t_angles, dtype=float)
    _, gp, _, hp = arm_lengths_many(cap, t_angles)
    return IotaMeasure(t_angles=t_angles, first=hp - 1.0, second=gp - 1.0)


# ---------------------------------------------------------------------------
# derivatives along Minkowski blends

def _support_gap(k1: Cap, k2: Cap, angles: np.ndarray) -> np.ndarray:
    return (np.asarray(support_of_polygon(k2.polygon, angles))
            - np.asarray(support_of_polygon(k1.polygon, angles)))


def _require_same_grid(k1: Cap, k2: Cap) -> AngleGrid:
    if k1.grid is None or k2.grid is None:
        raise ValueError("both caps need a canonical grid")
    if abs(k1.omega - k2.omega) > 1e-12 or k1.grid.n != k2.grid.n:
        raise ValueError("caps live on different grids")
    return k1.grid


def area_derivative(k1: Cap, k2: Cap) -> float:
    """d/dl |(1-l)K1 + l K2| at l = 0, as the pairing <p2 - p1, beta1>."""
    beta = boundary_measure(k1)
    return beta.pair(_support_gap(k1, k2, beta.angles))


def directional_derivative(k1: Cap, k2: Cap) -> float:
    """Derivative of the upper bound along the blend: <p2 - p1, beta1 - iota1>."""
    grid = _require_same_grid(k1, k2)
    beta = boundary_measure(k1)
    part_beta = beta.pair(_support_gap(k1, k2, beta.angles))
    io = iota(k1)
    gap1 = _support_gap(k1, k2, grid.mids1)
    gap2 = _support_gap(k1, k2, grid.mids2)
    part_iota = grid.delta * float(np.dot(gap1, io.first) + np.dot(gap2, io.second))
    return part_beta - part_iota


def blend_caps(k1: Cap, k2: Cap, lam: float) -> Cap:
    """Minkowski combination of two caps on the same grid, exactly."""
    grid = _require_same_grid(k1, k2)
    p = minkowski_combine(k1.support, k2.support, lam)
    return validate_cap(p.as_polygon(), k1.omega, grid=grid)


# ---------------------------------------------------------------------------
# Mamikon sweep, exact at polygon level

def _piecewise_square_cos(breaks: np.ndarray, coeff_a: np.ndarray, coeff_b: np.ndarray) -> float:
    """Integral of (a cos t + b sin t)^2 with piecewise-constant a, b."""
    t0, t1 = breaks[:-1], breaks[1:]

    def antider(a, b, t):
        return ((a * a + b * b) * t / 2.0
                + (a * a - b * b) * np.sin(2.0 * t) / 4.0
                - (a * b) * np.cos(2.0 * t) / 2.0)

    return float(np.sum(antider(coeff_a, coeff_b, t1) - antider(coeff_a, coeff_b, t0)))


def _breaks_in(poly: ConvexPolygon, lo: float, hi: float) -> np.ndarray:
    """Angles in [lo, hi] where a tangency vertex can switch."""
    phi = poly.edge_normals
    cand = np.mod(np.concatenate([phi, phi - math.pi / 2]), 2 * math.pi)
    sel = cand[(cand > lo + 1e-12) & (cand < hi - 1e-12)]
    return np.unique(np.concatenate([[lo], np.sort(sel), [hi]]))


def mamikon_sweep(cap: Cap) -> float:
    """Area swept between the upper boundary and the outer-corner curve.

    Computed as half the integral of squared tangent-segment lengths; both
    integrands are piecewise trigonometric for polygons, so each piece is
    integrated in closed form.
    """
    omega = cap.omega
    poly = cap.polygon

    # arm part on [0, omega]: h+(t) = (A+ - C+) . u_t, constant vertices per piece
    br = _breaks_in(poly, 0.0, omega)
    mid = 0.5 * (br[:-1] + br[1:])
    ap = vertex_pairs(poly, mid)[1]
    cp = vertex_pairs(poly, mid + math.pi / 2)[1]
    diff = ap - cp
    arm_part = _piecewise_square_cos(br, diff[:, 0], diff[:, 1])

    # tangent-cut part on [omega, omega + pi/2] against the wall at omega + pi/2
    t1 = omega + math.pi / 2
    h1 = float(support_of_polygon(poly, t1))
    br2 = _breaks_in(poly, omega, t1)
    mid2 = 0.5 * (br2[:-1] + br2[1:])
    _, vp = vertex_pairs(poly, mid2)
    kappa = h1 - vp @ u_vec(t1)
    scale = max(1.0, poly.max_radius)
    cut_part = 0.0
    for k, a, b in zip(kappa, br2[:-1], br2[1:]):
        if abs(k) <= 1e-12 * scale:
            continue
        cut_part += k * k * (1.0 / math.tan(t1 - b) - 1.0 / math.tan(t1 - a))
    return 0.5 * (arm_part + cut_part)


def tangent_cut(poly: ConvexPolygon, t: float, t1: float) -> float:
    """Signed distance along l(t) from v+(t) to the intersection with l(t1)."""
    s = math.sin(t1 - t)
    if abs(s) < 1e-14:
        raise ValueError("tangent lines are parallel")
    vp = vertex_pairs(poly, [t])[1][0]
    h1 = float(support_of_polygon(poly, t1))
    return float((h1 - vp @ u_vec(t1)) / s)


# ---------------------------------------------------------------------------
# concavity / quadraticity probe

@dataclass(frozen=True)
class ProbeReport:
    lambdas: np.ndarray
    values: np.ndarray
    chords: np.ndarray
    concave: bool
    quad_residual: float

    def to_csv(self) -> str:
        lines = ["lambda,a1,chord"]
        lines += [f"{l:.12g},{a:.12g},{c:.12g}"
                  for l, a, c in zip(self.lambdas, self.values, self.chords)]
        return "\n".join(lines) + "\n"


def concavity_probe(k1: Cap, k2: Cap, lam_samples: int = 9,
                    m: int = 2048, tol: float = 1e-9) -> ProbeReport:
    """Check concavity along the blend and fit the quadratic profile.

    Evaluates the bound at sampled lambdas, asserts it clears the chord,
    then fits a quadratic through three values and reports the residual of
    the remaining samples against the fit.
    """
    lams = np.linspace(0.0, 1.0, lam_samples)
    vals = np.array([a1(blend_caps(k1, k2, l), m) for l in lams])
    chords = (1.0 - lams) * vals[0] + lams * vals[-1]
    scale = max(1.0, np.abs(vals).max())
    concave = bool(np.all(vals >= chords - tol * scale - 1e-12))
    coeff = np.polyfit(lams[[0, lam_samples // 2, -1]],
                       vals[[0, lam_samples // 2, -1]], 2)
    resid = float(np.abs(np.polyval(coeff, lams) - vals).max())
    return ProbeReport(lambdas=lams, values=vals, chords=chords,
                       concave=concave, quad_residual=resid)
