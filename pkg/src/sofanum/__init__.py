"""Discretized convex-geometry toolkit for the moving sofa problem."""

from .convex_core import (
    AngleGrid,
    AngularMeasure,
    ConvexPolygon,
    SupportSamples,
    area_via_measure,
    boundary_arc,
    gauss_minkowski,
    minkowski_combine,
    mixed_volume,
    polygon_area,
    support_of_polygon,
    surface_measure,
    vertex_intersection,
    vertex_pair,
    width,
)
from .functional import (
    a1,
    area_derivative,
    boundary_measure,
    cap_from_boundary,
    concavity_probe,
    curve_area,
    directional_derivative,
    iota,
    mamikon_sweep,
)
from .hallway import (
    Fan,
    HallwayPose,
    Wedge,
    arm_lengths,
    corner_derivative,
    rotation_path,
    tangent_hallway,
    wedge,
)
from .maximizer import MaximizerSpec, build_maximizer, s1_curves, verify_maximizer
from .optimize import QpProblem, assemble, solve
from .sofa import (
    Cap,
    CapError,
    NicheRegion,
    SofaShape,
    build_sofa,
    injectivity_check,
    monotonize,
    niche,
    niche_contained,
    polygonal_bound,
    sofa_area,
    validate_cap,
)

__version__ = "0.1.0"
