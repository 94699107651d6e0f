"""Planar convex-body kernel at polygon precision.

Convex bodies are counterclockwise polygons. Angle-indexed data (support
samples, angular measures) lives on a grid over J = [0, omega] u
[pi/2, omega + pi/2] plus the two bottom normals pi + omega and 3*pi/2.
Identities that are exact for polygons (areas, edge-vector sums, measure
pairings) are computed exactly; only density discretization is O(1/n).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TAU = 2.0 * math.pi
GEOM_TOL = 1e-9


# ---------------------------------------------------------------------------
# angles and elementary vectors

def norm_angle(t):
    """Reduce an angle (scalar or array) to [0, 2*pi)."""
    return np.mod(t, TAU)


def ang_close(a: float, b: float, tol: float = GEOM_TOL) -> bool:
    """Wrap-aware angle equality."""
    d = math.remainder(a - b, TAU)
    return abs(d) <= tol


def u_vec(t):
    """Outward unit vector u_t = (cos t, sin t); vectorized over t."""
    t = np.asarray(t, dtype=float)
    return np.stack([np.cos(t), np.sin(t)], axis=-1)


def v_vec(t):
    """Left-rotated unit vector v_t = (-sin t, cos t); vectorized over t."""
    t = np.asarray(t, dtype=float)
    return np.stack([-np.sin(t), np.cos(t)], axis=-1)


def cross2(a, b):
    """Scalar 2D cross product a x b = ax*by - ay*bx (vectorized)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def line_intersection(t1: float, h1: float, t2: float, h2: float) -> np.ndarray:
    """Intersection of lines l(t1, h1) and l(t2, h2).

    Raises ValueError when the lines are parallel (sin(t2 - t1) = 0).
    """
    s = math.sin(t2 - t1)
    if abs(s) < 1e-14:
        raise ValueError(f"parallel tangent lines at angles {t1} and {t2}")
    beta = (h2 - h1 * math.cos(t2 - t1)) / s
    return h1 * u_vec(t1) + beta * v_vec(t1)


# ---------------------------------------------------------------------------
# convex polygons

@dataclass(frozen=True)
class ConvexPolygon:
    """Convex body as a CCW vertex chain; degenerate (segment, point) allowed."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.shape[0] == 0 or v.shape[1] != 2:
            raise ValueError("vertices must be a nonempty (N, 2) array")
        # drop exact consecutive duplicates (incl. closing wrap)
        if v.shape[0] > 1:
            keep = np.any(v != np.roll(v, 1, axis=0), axis=1)
            if keep.any():
                v = v[keep]
            else:
                v = v[:1]
        object.__setattr__(self, "vertices", v)
        n = v.shape[0]
        if n >= 3:
            e = np.roll(v, -1, axis=0) - v
            turn = cross2(e, np.roll(e, -1, axis=0))
            scale = max(1.0, float(np.abs(v).max()) ** 2)
            if np.any(turn < -1e-10 * scale):
                raise ValueError("vertex chain is not counterclockwise convex")

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def translate(self, d) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(d, dtype=float))

    @cached_property
    def _edge_data(self):
        """Edge normal angles in increasing cyclic order with start vertices."""
        v = self.vertices
        n = v.shape[0]
        if n == 1:
            return np.zeros(0), v
        e = np.roll(v, -1, axis=0) - v
        phi = norm_angle(np.arctan2(-e[:, 0], e[:, 1]))  # outward normal of CCW edge
        k0 = int(np.argmin(phi))
        order = (np.arange(n) + k0) % n
        return phi[order], v[order]

    @property
    def edge_normals(self) -> np.ndarray:
        """Outward normal angles of the edges, increasing in [0, 2*pi)."""
        return self._edge_data[0]

    @property
    def max_radius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())


def support_of_polygon(poly: ConvexPolygon, t) -> float | np.ndarray:
    """Support value sup {p . u_t : p in poly}, vectorized over t."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    v = poly.vertices
    if v.shape[0] <= 2:
        p = (v @ u_vec(t_arr).T).max(axis=0)
    else:
        phi, sv = poly._edge_data
        # vertex between edges j-1 and j supports all angles in [phi_{j-1}, phi_j]
        t_adj = phi[0] + norm_angle(t_arr - phi[0])
        j = np.searchsorted(phi, t_adj, side="left") % phi.shape[0]
        p = np.einsum("ij,ij->i", sv[j], u_vec(t_arr))
    return p if np.ndim(t) else float(p[0])


def vertex_pair(poly: ConvexPolygon, t: float, tol: float = GEOM_TOL):
    """Endpoints (v-, v+) of the edge with outward normal t.

    At an angle strictly between two edge normals both entries are the
    shared corner; exactly at an edge normal they are the edge endpoints
    ordered against/along v_t.
    """
    v = poly.vertices
    if v.shape[0] == 1:
        return v[0].copy(), v[0].copy()
    if v.shape[0] == 2:
        proj = v @ u_vec(t)
        if abs(proj[0] - proj[1]) <= tol * max(1.0, poly.max_radius):
            order = np.argsort(v @ v_vec(t))
            return v[order[0]].copy(), v[order[1]].copy()
        k = int(np.argmax(proj))
        return v[k].copy(), v[k].copy()
    phi, sv = poly._edge_data
    n = phi.shape[0]
    d = np.abs(np.remainder(phi - t + math.pi, TAU) - math.pi)
    hits = np.nonzero(d <= tol)[0]
    if hits.size:
        # contiguous run of parallel edges; span from first start to last end
        lo, hi = hits[0], hits[-1]
        return sv[lo].copy(), sv[(hi + 1) % n].copy()
    t_adj = phi[0] + norm_angle(t - phi[0])
    j = int(np.searchsorted(phi, t_adj, side="left")) % n
    return sv[j].copy(), sv[j].copy()


def convex_hull(points) -> ConvexPolygon:
    """CCW convex hull (monotone chain); collinear points are dropped."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] <= 2:
        return ConvexPolygon(pts)

    def half(chain_pts):
        out = []
        for p in chain_pts:
            while len(out) >= 2 and cross2(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return ConvexPolygon(np.asarray(lower[:-1] + upper[:-1]))


def vertex_pairs(poly: ConvexPolygon, ts, tol: float = GEOM_TOL):
    """Vectorized vertex_pair: arrays (v-, v+) for a batch of angles."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    v = poly.vertices
    if v.shape[0] <= 2:
        pairs = [vertex_pair(poly, float(t), tol) for t in ts]
        return (np.array([a for a, _ in pairs]), np.array([b for _, b in pairs]))
    phi, sv = poly._edge_data
    n = phi.shape[0]
    t_adj = phi[0] + norm_angle(ts - phi[0])
    j = np.searchsorted(phi, t_adj, side="left") % n
    jl = (j - 1) % n
    d_right = np.abs(np.remainder(phi[j] - ts + math.pi, TAU) - math.pi)
    d_left = np.abs(np.remainder(phi[jl] - ts + math.pi, TAU) - math.pi)
    k = np.where(d_left < d_right, jl, j)
    hit = np.minimum(d_left, d_right) <= tol
    vminus = np.where(hit[:, None], sv[k], sv[j])
    vplus = np.where(hit[:, None], sv[(k + 1) % n], sv[j])
    return vminus, vplus


def polygon_area(poly: ConvexPolygon) -> float:
    """Enclosed area by the shoelace formula (0 for degenerate chains)."""
    v = poly.vertices
    if v.shape[0] < 3:
        return 0.0
    return 0.5 * float(np.sum(cross2(v, np.roll(v, -1, axis=0))))


# ---------------------------------------------------------------------------
# support samples on an angle grid

@dataclass(frozen=True)
class SupportSamples:
    """Support-function values on an ordered angle grid (bottom normals last)."""

    omega: float
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        w = np.asarray(self.values, dtype=float)
        if g.shape != w.shape or g.ndim != 1:
            raise ValueError("grid and values must be matching 1D arrays")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", w)

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Grid index of angle t; raises if t is not a grid angle."""
        d = np.abs(np.remainder(self.grid - t + math.pi, TAU) - math.pi)
        k = int(np.argmin(d))
        if d[k] > tol:
            raise KeyError(f"angle {t} not on grid (nearest off by {d[k]:.3g})")
        return k

    def value_at(self, t: float) -> float:
        """Support at a grid angle, or linearly interpolated inside an arc."""
        try:
            return float(self.values[self.index_of(t)])
        except KeyError:
            pass
        om = self.omega
        tn = norm_angle(t)
        for lo, hi in ((0.0, om), (math.pi / 2, om + math.pi / 2)):
            if lo - 1e-12 <= tn <= hi + 1e-12:
                inside = (self.grid >= lo - 1e-12) & (self.grid <= hi + 1e-12)
                g, w = self.grid[inside], self.values[inside]
                return float(np.interp(tn, g, w))
        raise KeyError(f"angle {t} not resolvable on grid or inside J_omega")

    def same_grid(self, other: "SupportSamples", tol: float = 1e-9) -> bool:
        return (
            self.grid.shape == other.grid.shape
            and abs(self.omega - other.omega) <= tol
            and bool(np.all(np.abs(self.grid - other.grid) <= tol))
        )

    def as_polygon(self, tol: float = GEOM_TOL) -> ConvexPolygon:
        """Chain consecutive tangent-line intersections into the polygon.

        Exact when the samples are the supports of a polygon whose edge
        normals all lie on this grid.
        """
        g, w = self.grid, self.values
        n = g.shape[0]
        pts = []
        for i in range(n):
            j = (i + 1) % n
            t2 = g[j] if j != 0 else g[0] + TAU
            pts.append(line_intersection(g[i], w[i], t2, w[j]))
        pts = np.asarray(pts)
        scale = max(1.0, float(np.abs(pts).max()))
        keep = np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1) > tol * scale
        if not keep.any():
            keep[0] = True
        return ConvexPolygon(pts[keep])


def support_from_polygon(poly: ConvexPolygon, omega: float, grid) -> SupportSamples:
    grid = np.asarray(grid, dtype=float)
    return SupportSamples(omega, grid, np.atleast_1d(support_of_polygon(poly, grid)))


def vertex_intersection(p: SupportSamples, t1: float, t2: float) -> np.ndarray:
    """Tangent-line intersection l(t1) ^ l(t2) from sampled supports."""
    return line_intersection(t1, p.value_at(t1), t2, p.value_at(t2))


def minkowski_combine(p1: SupportSamples, p2: SupportSamples, lam: float) -> SupportSamples:
    """Support of the Minkowski combination (1-lam) K1 + lam K2."""
    if not p1.same_grid(p2):
        raise ValueError("support samples live on different grids")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    return SupportSamples(p1.omega, p1.grid.copy(), (1.0 - lam) * p1.values + lam * p2.values)


def width(shape, t: float) -> float:
    """Width p(t) + p(t + pi) along u_t; exact for polygons."""
    if isinstance(shape, ConvexPolygon):
        return float(support_of_polygon(shape, t) + support_of_polygon(shape, t + math.pi))
    return shape.value_at(t) + shape.value_at(t + math.pi)


# ---------------------------------------------------------------------------
# angular measures

@dataclass(frozen=True)
class AngularMeasure:
    """Atoms plus optional sampled density on circle subsets."""

    angles: np.ndarray
    weights: np.ndarray
    density_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if a.shape != w.shape or a.ndim != 1:
            raise ValueError("angles and weights must be matching 1D arrays")
        order = np.argsort(a)
        object.__setattr__(self, "angles", a[order])
        object.__setattr__(self, "weights", w[order])
        object.__setattr__(self, "density_angles", np.asarray(self.density_angles, dtype=float))
        object.__setattr__(self, "density_values", np.asarray(self.density_values, dtype=float))

    @property
    def has_density(self) -> bool:
        return self.density_angles.size > 0

    def discretized(self, cell_width: float) -> "AngularMeasure":
        """Fold densities into atoms (one atom of mass f*dt per sample cell)."""
        if not self.has_density:
            return self
        a = np.concatenate([self.angles, self.density_angles])
        w = np.concatenate([self.weights, self.density_values * cell_width])
        return AngularMeasure(a, w)

    def total_mass(self) -> float:
        if self.has_density:
            raise ValueError("discretize density before mass queries")
        return float(self.weights.sum())

    def closure_defect(self) -> float:
        """Norm of the edge-vector sum; zero for measures of closed bodies."""
        if self.has_density:
            raise ValueError("discretize density before closure queries")
        return float(np.linalg.norm(self.weights @ v_vec(self.angles)))

    def restricted(self, lo: float, hi: float, tol: float = 1e-9) -> "AngularMeasure":
        """Atoms with angle in [lo, hi] (no wrap)."""
        m = (self.angles >= lo - tol) & (self.angles <= hi + tol)
        return AngularMeasure(self.angles[m], self.weights[m])

    def pair(self, f) -> float:
        """Pairing <f, mu> with a callable or per-atom value array."""
        if self.has_density:
            raise ValueError("discretize density before pairing")
        vals = f(self.angles) if callable(f) else np.asarray(f, dtype=float)
        return float(np.dot(vals, self.weights))

    def weights_at(self, angles, tol: float) -> np.ndarray:
        """Atom weights at query angles within tol (zero where no atom)."""
        angles = np.asarray(angles, dtype=float)
        out = np.zeros(angles.shape)
        if self.angles.size:
            j = np.clip(np.searchsorted(self.angles, angles), 0, self.angles.size - 1)
            jl = np.maximum(j - 1, 0)
            dj = np.abs(self.angles[j] - angles)
            dl = np.abs(self.angles[jl] - angles)
            k = np.where(dl < dj, jl, j)
            hit = np.minimum(dj, dl) <= tol
            out[hit] = self.weights[k[hit]]
        return out


def surface_measure(poly: ConvexPolygon) -> AngularMeasure:
    """Surface-area measure: one atom per edge, weight = edge length."""
    v = poly.vertices
    if v.shape[0] == 1:
        return AngularMeasure(np.zeros(0), np.zeros(0))
    e = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(e, axis=1)
    phi = norm_angle(np.arctan2(-e[:, 0], e[:, 1]))
    return AngularMeasure(phi, lengths)


def area_via_measure(p: SupportSamples, sigma: AngularMeasure) -> float:
    """Area as half the support/measure pairing <p, sigma>/2."""
    vals = np.array([p.value_at(t) for t in sigma.angles])
    return 0.5 * sigma.pair(vals)


def mixed_volume(p1: SupportSamples, sigma2: AngularMeasure) -> float:
    """Mixed volume V(K1, K2) = <p_K1, sigma_K2>/2."""
    return area_via_measure(p1, sigma2)


class ClosureError(ValueError):
    """Edge vectors of a measure do not sum to zero."""


def gauss_minkowski(sigma: AngularMeasure, tol: float = 1e-7) -> ConvexPolygon:
    """Reconstruct the convex polygon with surface measure sigma.

    Chains edge vectors w_i * v_{t_i} in increasing angle order anchored at
    the origin; unique up to translation. Raises ClosureError when the
    closure defect exceeds tol.
    """
    if sigma.has_density:
        raise ValueError("discretize density before reconstruction")
    defect = sigma.closure_defect()
    scale = max(1.0, sigma.total_mass())
    if defect > tol * scale:
        raise ClosureError(f"measure does not close up (defect {defect:.3g})")
    keep = sigma.weights > 0
    ang, w = sigma.angles[keep], sigma.weights[keep]
    if ang.size == 0:
        return ConvexPolygon(np.zeros((1, 2)))
    edges = w[:, None] * v_vec(ang)
    verts = np.vstack([[0.0, 0.0], np.cumsum(edges, axis=0)[:-1]])
    return ConvexPolygon(verts)


# ---------------------------------------------------------------------------
# boundary arcs

def boundary_arc(poly: ConvexPolygon, t0: float, t1: float, closed_start: bool = False) -> np.ndarray:
    """CCW vertex chain along the boundary for normals in (t0, t1].

    Starts at v+(t0) and walks the edges with normals in (t0, t1]; with
    closed_start it starts at v-(t0) and covers [t0, t1] instead. t1 may
    equal t0 + 2*pi for the full circuit. The chain length equals the
    surface measure of the angle interval.
    """
    if not t0 <= t1 <= t0 + TAU + 1e-12:
        raise ValueError("need t0 <= t1 <= t0 + 2*pi")
    start = vertex_pair(poly, t0)[0 if closed_start else 1]
    pts = [np.asarray(start, dtype=float)]
    phi, sv = poly._edge_data
    n = phi.shape[0]
    if n:
        eps = 1e-12
        lift = t0 + np.remainder(phi - t0, TAU)
        if not closed_start:
            # edges sitting exactly at t0 belong to the far end of the lift
            lift = np.where(lift <= t0 + eps, lift + TAU, lift)
        sel = np.nonzero(lift <= t1 + eps)[0]
        for k in sel[np.argsort(lift[sel])]:
            pts.append(sv[(k + 1) % n])
    final = vertex_pair(poly, t1)[1]
    if not np.array_equal(pts[-1], final):
        pts.append(final)
    if len(pts) == 1:
        pts.append(pts[0])  # degenerate arc: a single vertex
    return np.asarray(pts, dtype=float)


def polyline_length(pts: np.ndarray) -> float:
    pts = np.asarray(pts, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


# ---------------------------------------------------------------------------
# canonical cap grid

@dataclass(frozen=True)
class AngleGrid:
    """Uniform discretization of J_omega: n cells per unit radian of arc.

    Edge normals of canonical caps live at the cell midpoints plus the four
    special angles {0, omega, pi/2, omega + pi/2}; bottom normals are kept
    separately. For omega = pi/2 the shared angle pi/2 and the single bottom
    normal 3*pi/2 are deduplicated.
    """

    omega: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.omega <= math.pi / 2 + 1e-12:
            raise ValueError("omega must lie in (0, pi/2]")
        if self.n < 1:
            raise ValueError("n must be positive")

    @cached_property
    def m(self) -> int:
        return max(1, round(self.n * self.omega))

    @cached_property
    def delta(self) -> float:
        return self.omega / self.m

    @cached_property
    def mids1(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.delta

    @cached_property
    def mids2(self) -> np.ndarray:
        return self.mids1 + math.pi / 2

    @property
    def is_right_angle(self) -> bool:
        return abs(self.omega - math.pi / 2) <= 1e-12

    @cached_property
    def specials(self) -> np.ndarray:
        if self.is_right_angle:
            return np.array([0.0, math.pi / 2, self.omega + math.pi / 2])
        return np.array([0.0, self.omega, math.pi / 2, self.omega + math.pi / 2])

    @cached_property
    def edge_angles(self) -> np.ndarray:
        """All possible upper-boundary edge normals, sorted."""
        return np.sort(np.concatenate([self.specials, self.mids1, self.mids2]))

    @cached_property
    def bottom_angles(self) -> np.ndarray:
        if self.is_right_angle:
            return np.array([1.5 * math.pi])
        return np.array([math.pi + self.omega, 1.5 * math.pi])

    @cached_property
    def support_angles(self) -> np.ndarray:
        return np.concatenate([self.edge_angles, self.bottom_angles])

    @cached_property
    def first_arc(self) -> np.ndarray:
        """Mask of edge_angles belonging to [0, omega]."""
        return self.edge_angles <= self.omega + 1e-12

    @cached_property
    def constraint_matrix(self) -> np.ndarray:
        """Rows of the two tangency equations against the edge-angle slots.

        Row 1 integrates cos(t) over [0, omega]; row 2 integrates
        cos(omega + pi/2 - t) over [pi/2, omega + pi/2]. For omega = pi/2
        the shared slot pi/2 has zero coefficient in both rows.
        """
        th = self.edge_angles
        in1 = th <= self.omega + 1e-12
        in2 = th >= math.pi / 2 - 1e-12
        a1 = np.where(in1, np.cos(th), 0.0)
        a2 = np.where(in2, np.cos(self.omega + math.pi / 2 - th), 0.0)
        return np.vstack([a1, a2])

    @cached_property
    def mid_idx1(self) -> np.ndarray:
        """Positions of the first-arc cell midpoints inside edge_angles."""
        return np.searchsorted(self.edge_angles, self.mids1)

    @cached_property
    def mid_idx2(self) -> np.ndarray:
        """Positions of the second-arc cell midpoints inside edge_angles."""
        return np.searchsorted(self.edge_angles, self.mids2)

    def support_samples(self, poly: ConvexPolygon) -> SupportSamples:
        return support_from_polygon(poly, self.omega, self.support_angles)


# ---------------------------------------------------------------------------
# JSON schemas

def support_to_json(p: SupportSamples) -> str:
    return json.dumps({"omega": p.omega, "grid": p.grid.tolist(), "support": p.values.tolist()})


def support_from_json(text: str) -> SupportSamples:
    d = json.loads(text)
    return SupportSamples(float(d["omega"]), np.asarray(d["grid"]), np.asarray(d["support"]))


def measure_to_json(mu: AngularMeasure) -> str:
    return json.dumps({
        "atoms": [[a, w] for a, w in zip(mu.angles.tolist(), mu.weights.tolist())],
        "density": [[a, f] for a, f in zip(mu.density_angles.tolist(), mu.density_values.tolist())],
    })


def measure_from_json(text: str) -> AngularMeasure:
    d = json.loads(text)
    atoms = np.asarray(d.get("atoms", []), dtype=float).reshape(-1, 2)
    dens = np.asarray(d.get("density", []), dtype=float).reshape(-1, 2)
    return AngularMeasure(atoms[:, 0], atoms[:, 1], dens[:, 0], dens[:, 1])
