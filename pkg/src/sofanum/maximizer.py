"""The closed-form maximizing cap and its verification suite.

The optimal cap has boundary density (omega - t) dt on the first arc,
t dt on the shifted arc, and unit atoms at the arc ends (a single weight-2
atom at pi/2 when omega = pi/2). Its upper-bound value is 1 + omega^2/2.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .convex_core import AngleGrid, AngularMeasure
from .functional import a1, boundary_measure, cap_from_boundary, directional_derivative, iota
from .sofa import Cap


@dataclass(frozen=True)
class MaximizerSpec:
    omega: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.omega <= math.pi / 2 + 1e-12:
            raise ValueError("omega must lie in (0, pi/2]")

    @property
    def grid(self) -> AngleGrid:
        return AngleGrid(self.omega, self.n)


def rescale_to_constraints(angles: np.ndarray, weights: np.ndarray,
                           omega: float) -> np.ndarray:
    """Scale each arc's weights so both tangency integrals equal one.

    Only slots with a positive constraint coefficient are touched, so the
    zero-coefficient atom at pi/2 (omega = pi/2) keeps its drawn weight.
    """
    w = weights.astype(float).copy()
    in1 = angles <= omega + 1e-12
    c1 = np.where(in1, np.cos(angles), 0.0)
    c2 = np.where(angles >= math.pi / 2 - 1e-12,
                  np.cos(omega + math.pi / 2 - angles), 0.0)
    for coeff in (c1, c2):
        active = coeff > 1e-12
        total = float(np.dot(coeff[active], w[active]))
        if total <= 0:
            raise ValueError("cannot rescale: arc carries no constraint mass")
        w[active] /= total
    return w


def maximizer_measure(spec: MaximizerSpec) -> AngularMeasure:
    """Discretized optimal boundary measure on the canonical grid."""
    g = spec.grid
    om = spec.omega
    w1 = (om - g.mids1) * g.delta
    w2 = (g.mids1) * g.delta
    if g.is_right_angle:
        atom_angles = [math.pi / 2]
        atom_weights = [2.0]
    else:
        atom_angles = [om, math.pi / 2]
        atom_weights = [1.0, 1.0]
    angles = np.concatenate([g.mids1, atom_angles, g.mids2])
    weights = np.concatenate([w1, atom_weights, w2])
    order = np.argsort(angles)
    angles, weights = angles[order], weights[order]
    weights = rescale_to_constraints(angles, weights, om)
    return AngularMeasure(angles, weights)


def build_maximizer(spec: MaximizerSpec) -> Cap:
    """Construct the optimal cap at the requested grid resolution."""
    return cap_from_boundary(maximizer_measure(spec), spec.omega, grid=spec.grid)


def random_cap(grid: AngleGrid, rng: np.random.Generator,
               corner_atoms: bool = True) -> Cap:
    """Random valid cap: nonnegative slot weights rescaled into feasibility.

    With corner_atoms, the four special slots occasionally receive O(1)
    atoms so the family mixes smooth and cornered upper boundaries.
    """
    w = rng.uniform(0.0, 1.0, size=grid.edge_angles.size) * grid.delta
    if corner_atoms:
        for idx in np.flatnonzero(np.isin(grid.edge_angles, grid.specials)):
            if rng.random() < 0.5:
                w[idx] = rng.uniform(0.0, 1.0)
    w = rescale_to_constraints(grid.edge_angles, w, grid.omega)
    return cap_from_boundary(AngularMeasure(grid.edge_angles, w), grid.omega, grid=grid)


# ---------------------------------------------------------------------------
# boundary curves of the optimal sofa (centered frame)

@dataclass(frozen=True)
class S1Curves:
    """Boundary of the optimal sofa: two integrated curves plus segments."""

    gamma: np.ndarray            # right-side curve from (1, 1) down to (pi/2, 0)
    corner: np.ndarray           # bottom-middle inner-corner curve
    segments: list               # three horizontal joins, each (p, q)


def s1_curves(n: int = 2048) -> S1Curves:
    """Integrate the boundary derivative fields of the optimal sofa.

    Works in the centered frame (offset (-1, 0) from cap coordinates): the
    right curve starts at (1, 1) with derivative t*(cos t, -sin t); the
    corner curve starts at (pi/2 - 1, 0).
    """
    if n < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, math.pi / 2, n)

    dgamma = ts[:, None] * np.stack([np.cos(ts), -np.sin(ts)], axis=1)
    gamma = np.vstack([[1.0, 1.0],
                       np.cumsum(0.5 * (dgamma[1:] + dgamma[:-1])
                                 * np.diff(ts)[:, None], axis=0) + [1.0, 1.0]])

    dx = (-ts[:, None] * np.stack([np.cos(ts), np.sin(ts)], axis=1)
          + (math.pi / 2 - ts)[:, None] * np.stack([-np.sin(ts), np.cos(ts)], axis=1))
    x0 = np.array([math.pi / 2 - 1.0, 0.0])
    corner = np.vstack([x0,
                        np.cumsum(0.5 * (dx[1:] + dx[:-1])
                                  * np.diff(ts)[:, None], axis=0) + x0])

    mirror = gamma * np.array([-1.0, 1.0])
    segments = [
        (mirror[0], gamma[0]),                 # top edge, length 2
        (corner[0], gamma[-1]),                # bottom right join, length 1
        (mirror[-1], corner[-1]),              # bottom left join, length 1
    ]
    return S1Curves(gamma=gamma, corner=corner, segments=segments)


# ---------------------------------------------------------------------------
# optimality verification

@dataclass(frozen=True)
class MaximizerReport:
    omega: float
    n: int
    trials: int
    density_gap: float        # sup |beta - iota| density on the open arcs
    max_derivative: float     # max |D A1(K; K')| over the random caps
    a1_value: float
    a1_target: float
    max_rival: float          # best A1 among the random caps
    dominated: bool           # every rival below a1_value + tol

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(sorted(self.__dict__))
        writer.writerow([self.__dict__[k] for k in sorted(self.__dict__)])
        return buf.getvalue()


def verify_maximizer(spec: MaximizerSpec, trials: int = 20, tol: float = 1e-3,
                     seed: int = 0, m: int = 2048) -> MaximizerReport:
    """Check the stationarity and dominance of the optimal cap numerically."""
    cap = build_maximizer(spec)
    grid = spec.grid

    beta = boundary_measure(cap)
    io_meas = iota(cap)
    dens1 = beta.weights_at(grid.mids1, grid.delta / 4) / grid.delta
    dens2 = beta.weights_at(grid.mids2, grid.delta / 4) / grid.delta
    density_gap = float(max(np.abs(dens1 - io_meas.first).max(),
                            np.abs(dens2 - io_meas.second).max()))

    rng = np.random.default_rng(seed)
    value = a1(cap, m)
    max_d = 0.0
    max_rival = -math.inf
    for _ in range(trials):
        rival = random_cap(grid, rng)
        max_d = max(max_d, abs(directional_derivative(cap, rival)))
        max_rival = max(max_rival, a1(rival, m))

    return MaximizerReport(
        omega=spec.omega, n=spec.n, trials=trials,
        density_gap=density_gap,
        max_derivative=max_d,
        a1_value=value,
        a1_target=1.0 + spec.omega ** 2 / 2.0,
        max_rival=max_rival,
        dominated=bool(max_rival <= value + tol),
    )
