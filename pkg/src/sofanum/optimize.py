"""Concave QP over boundary-measure coordinates.

Maximizes the discretized upper bound without using the closed-form
optimum. Weights sit on the J_omega slots of the canonical grid; the two
tangency integrals are the equality constraints. The objective is
assembled exactly: the cap built from a weight vector is an affine chain
(cumulative edge vectors, closing bottom atoms, standardizing
translation), so every support value is affine in the weights and the
bound is a genuine quadratic on the constraint slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .convex_core import AngleGrid, AngularMeasure, u_vec, v_vec
from .functional import a1, boundary_measure, cap_from_boundary
from .maximizer import MaximizerSpec, build_maximizer, rescale_to_constraints
from .sofa import Cap


# ---------------------------------------------------------------------------
# affine chain evaluation (fixed tangency pattern)

def _slot_index(grid: AngleGrid, angle: float) -> int:
    idx = np.flatnonzero(np.abs(grid.edge_angles - angle) <= 1e-12)
    if idx.size != 1:
        raise ValueError(f"angle {angle} is not a unique grid slot")
    return int(idx[0])


@dataclass(frozen=True)
class _ChainLayout:
    """Precomputed pattern data for the affine chain of one grid."""

    grid: AngleGrid
    ts: np.ndarray        # path angles in [0, omega]
    j1: np.ndarray        # supporting-vertex index per path angle
    j2: np.ndarray        # same for the shifted angles
    i_top: int            # slot index of pi/2
    i_aux: tuple          # (i_0, i_pi) for omega = pi/2, else (i_omega,)


def _make_layout(grid: AngleGrid, path_count: int) -> _ChainLayout:
    ts = np.linspace(0.0, grid.omega, path_count)
    all_ang = np.concatenate([grid.edge_angles, grid.bottom_angles])
    j1 = np.searchsorted(all_ang, ts, side="left")
    j2 = np.searchsorted(all_ang, ts + math.pi / 2, side="left")
    i_top = _slot_index(grid, math.pi / 2)
    if grid.is_right_angle:
        aux = (_slot_index(grid, 0.0), _slot_index(grid, grid.omega + math.pi / 2))
    else:
        aux = (_slot_index(grid, grid.omega),)
    return _ChainLayout(grid=grid, ts=ts, j1=j1, j2=j2, i_top=i_top, i_aux=aux)


def _chain_outputs(layout: _ChainLayout, w: np.ndarray):
    """Full weights, slot supports, and path supports for a weight vector.

    Pure affine formulas: valid for any w, exact whenever w is feasible.
    """
    grid = layout.grid
    slots = grid.edge_angles
    om = grid.omega
    if grid.is_right_angle:
        wb = np.array([float(np.sum(w * np.sin(slots)))])
    else:
        closure = w @ v_vec(slots)
        cols = np.stack([v_vec(1.5 * math.pi), v_vec(math.pi + om)], axis=1)
        sol = np.linalg.solve(cols, -closure)
        wb = np.array([sol[1], sol[0]])  # order: pi + omega, then 3*pi/2
    all_ang = np.concatenate([slots, grid.bottom_angles])
    w_full = np.concatenate([w, wb])
    edges = w_full[:, None] * v_vec(all_ang)
    verts = np.vstack([[0.0, 0.0], np.cumsum(edges, axis=0)[:-1]])
    sup_raw = np.einsum("ij,ij->i", verts, u_vec(all_ang))

    if grid.is_right_angle:
        i0, ipi = layout.i_aux
        cy = 1.0 - sup_raw[layout.i_top]
        cx = 1.0 - 0.5 * (sup_raw[i0] - sup_raw[ipi])
        c = np.array([cx, cy])
    else:
        rows = np.stack([u_vec(om), v_vec(0.0)])
        rhs = np.array([1.0 - sup_raw[layout.i_aux[0]],
                        1.0 - sup_raw[layout.i_top]])
        c = np.linalg.solve(rows, rhs)

    sup_slots = sup_raw + u_vec(all_ang) @ c
    vtrans = verts + c
    ts = layout.ts
    p1 = np.einsum("ij,ij->i", vtrans[layout.j1], u_vec(ts))
    p2 = np.einsum("ij,ij->i", vtrans[layout.j2], u_vec(ts + math.pi / 2))
    return w_full, sup_slots, p1, p2


@dataclass
class QpProblem:
    """Quadratic objective with the tangency equalities and box bounds."""

    omega: float
    grid: AngleGrid
    Q: np.ndarray
    b: np.ndarray
    c: float
    A: np.ndarray
    e: np.ndarray
    w_max: float
    anchor_w: np.ndarray
    path_count: int

    @property
    def dim(self) -> int:
        return self.b.size

    def objective(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return float(self.c + self.b @ w + 0.5 * w @ (self.Q @ w))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return self.b + self.Q @ np.asarray(w, dtype=float)


def weights_of_cap(cap: Cap, grid: AngleGrid) -> np.ndarray:
    """Boundary-measure weights of a cap matched onto the grid slots."""
    beta = boundary_measure(cap)
    return beta.weights_at(grid.edge_angles, grid.delta / 4.0)


def cap_of_weights(p: QpProblem, w: np.ndarray) -> Cap:
    return cap_from_boundary(AngularMeasure(p.grid.edge_angles, np.asarray(w, float)),
                             p.omega, grid=p.grid)


def assemble(omega: float, n: int, anchor: Cap | None = None,
             w_max: float = 10.0, path_factor: int = 4) -> QpProblem:
    """Build the QP by reading off the affine chain around a feasible anchor.

    The chain maps (weights -> supports) are globally affine with the grid's
    fixed tangency pattern, so single unit-step differences recover them
    exactly; the quadratic is then their bilinear combination, projected
    onto the constraint slice where the concavity argument applies.
    """
    grid = AngleGrid(omega, n)
    if anchor is None:
        anchor = build_maximizer(MaximizerSpec(omega, n))
    w0 = weights_of_cap(anchor, grid)
    A = grid.constraint_matrix
    e = np.ones(2)
    if np.any(w0 < -1e-12) or np.max(np.abs(A @ w0 - e)) > 1e-6:
        raise ValueError("anchor cap is not strictly feasible on this grid")

    d = grid.edge_angles.size
    pcount = max(2, path_factor * grid.m + 1)
    layout = _make_layout(grid, pcount)

    base = _chain_outputs(layout, w0)
    mats = []
    for i in range(d):
        wi = w0.copy()
        wi[i] += 1.0
        mats.append(_chain_outputs(layout, wi))
    F1, S1, P11, P21 = (np.stack([m[k] - base[k] for m in mats], axis=1)
                        for k in range(4))
    F0, S0, P10, P20 = (base[k] - M @ w0 for k, M in
                        zip(range(4), (F1, S1, P11, P21)))

    # |K| = (1/2) sum_k p_k w_k over all edges including the bottoms
    Q = 0.5 * (S1.T @ F1 + F1.T @ S1)
    b = 0.5 * (F1.T @ S0 + S1.T @ F0)
    c = 0.5 * float(S0 @ F0)

    # I(x): path points are affine images of the supports
    ts = layout.ts
    ct, st = np.cos(ts)[:, None], np.sin(ts)[:, None]
    X1 = ct * P11 - st * P21
    Y1 = st * P11 + ct * P21
    X0 = ct[:, 0] * (P10 - 1.0) - st[:, 0] * (P20 - 1.0)
    Y0 = st[:, 0] * (P10 - 1.0) + ct[:, 0] * (P20 - 1.0)

    def shift_terms(A0, A1, B0, B1):
        cc = float(A0[:-1] @ B0[1:])
        bb = A1[:-1].T @ B0[1:] + B1[1:].T @ A0[:-1]
        M = A1[:-1].T @ B1[1:]
        return cc, bb, M + M.T

    cxy, bxy, Qxy = shift_terms(X0, X1, Y0, Y1)
    cyx, byx, Qyx = shift_terms(Y0, Y1, X0, X1)
    # I = (1/2)(D(x, y) - D(y, x)) with D the shifted dot product
    Q -= 0.5 * (Qxy - Qyx)
    b -= 0.5 * (bxy - byx)
    c -= 0.5 * (cxy - cyx)

    # restrict the quadratic to the constraint slice; off-slice directions
    # carry no meaning and would pollute the concavity spectrum
    N = null_space(A)
    wr = np.linalg.lstsq(A, e, rcond=None)[0]
    M = N.T @ Q @ N
    Qs = N @ M @ N.T
    Qs = 0.5 * (Qs + Qs.T)
    bs = b + Q @ wr - Qs @ wr
    cs = (c + b @ wr + 0.5 * wr @ (Q @ wr)
          - bs @ wr - 0.5 * wr @ (Qs @ wr))

    return QpProblem(omega=omega, grid=grid, Q=Qs, b=bs, c=float(cs),
                     A=A, e=e, w_max=w_max, anchor_w=w0, path_count=pcount)


# ---------------------------------------------------------------------------
# projection and the projected-gradient solver

def project_feasible(p: QpProblem, w: np.ndarray,
                     tol: float = 1e-10, max_rounds: int = 10_000) -> np.ndarray:
    """Alternate the affine solve with box clamping to a fixed point."""
    A, e = p.A, p.e
    AAt_inv = np.linalg.inv(A @ A.T)
    w = np.asarray(w, dtype=float).copy()
    for _ in range(max_rounds):
        w = w - A.T @ (AAt_inv @ (A @ w - e))
        clipped = np.clip(w, 0.0, p.w_max)
        moved = float(np.abs(clipped - w).max())
        w = clipped
        if moved <= tol and float(np.abs(A @ w - e).max()) <= tol:
            break
    return w


def uniform_start(p: QpProblem) -> np.ndarray:
    return project_feasible(p, np.full(p.dim, p.grid.delta))


def spectral_bound(Q: np.ndarray, iters: int = 80, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(Q.shape[0])
    v /= np.linalg.norm(v)
    lam = 1.0
    for _ in range(iters):
        v = Q @ v
        lam = float(np.linalg.norm(v))
        if lam == 0.0:
            return 1.0
        v /= lam
    return lam


def certificate(p: QpProblem, w: np.ndarray, active_tol: float = 1e-9) -> float:
    """Largest linearized gain over unit feasible directions at w (an LP)."""
    g = p.gradient(w)
    lo = np.where(w <= active_tol, 0.0, -1.0)
    hi = np.where(w >= p.w_max - active_tol, 0.0, 1.0)
    res = linprog(-g, A_eq=p.A, b_eq=np.zeros(2),
                  bounds=list(zip(lo, hi)), method="highs")
    if not res.success:
        return float("nan")
    return max(0.0, float(-res.fun))


@dataclass
class SolveResult:
    w: np.ndarray
    value: float
    iterations: int
    converged: bool
    certificate: float
    trace: list = field(default_factory=list)

    def trace_csv(self) -> str:
        lines = ["iteration,objective,certificate"]
        lines += [f"{i},{obj:.12g},{cert:.6g}" for i, obj, cert in self.trace]
        return "\n".join(lines) + "\n"


def solve(p: QpProblem, start: np.ndarray | None = None,
          max_iters: int = 50_000, tol: float = 1e-13,
          cert_every: int = 0) -> SolveResult:
    """Projected gradient ascent with fixed step 1/(2L) and safe extrapolation.

    L is the power-iteration spectral bound of Q; projection is the
    alternating affine-solve/clamp fixed point. A Nesterov extrapolation,
    restarted and replaced by the plain step whenever it fails to ascend,
    keeps the objective trace monotone while converging far faster than the
    plain iteration. Terminates when the gain drops below tol; flags budget
    exhaustion via `converged`.
    """
    w = project_feasible(p, p.anchor_w if start is None else np.asarray(start, float))
    L = spectral_bound(p.Q)
    step = 1.0 / (2.0 * max(L, 1e-12))
    value = p.objective(w)
    cert = certificate(p, w)
    trace = [(0, value, cert)]
    converged = False
    w_prev = w.copy()
    tk = 1.0
    it = 0
    for it in range(1, max_iters + 1):
        tk_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
        beta = (tk - 1.0) / tk_next
        z = w + beta * (w - w_prev)
        cand = project_feasible(p, z + step * p.gradient(z))
        v_cand = p.objective(cand)
        if v_cand < value:
            # extrapolation overshot: plain ascent step and momentum restart
            cand = project_feasible(p, w + step * p.gradient(w))
            v_cand = p.objective(cand)
            tk_next = 1.0
            if v_cand < value:
                cand, v_cand = w, value
        gain = v_cand - value
        w_prev, w, value, tk = w, cand, v_cand, tk_next
        if cert_every and it % cert_every == 0:
            cert = certificate(p, w)
        trace.append((it, value, cert))
        if gain < tol:
            converged = True
            break
    cert = certificate(p, w)
    if trace:
        trace[-1] = (it, value, cert)
    return SolveResult(w=w, value=value, iterations=it, converged=converged,
                       certificate=cert, trace=trace)
