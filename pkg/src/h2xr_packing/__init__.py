"""Densest geodesic ball packings of H2xR under screw-motion groups."""

from .exceptions import (
    InvalidPointError,
    NoConvergenceError,
    NonHyperbolicSignatureError,
    OverlapError,
    PackingError,
    UnsolvedCaseError,
)
from .frobenius import (
    KernelSite,
    Site,
    TranslationClass,
    brute_force_congruences,
    enumerate_multiply,
    enumerate_simply,
)
from .h2xr_geometry import (
    GeodesicShot,
    H2xRPoint,
    ball_volume,
    geodesic_point,
    h2xr_distance,
    solve_shot,
)
from .hyperbolic_plane import (
    H2Isometry,
    H2Point,
    fundamental_domain_area,
    h2_distance,
    triangle_vertices,
)
from .packing_optimizer import (
    LimitEstimate,
    PackingSolution,
    SweepReport,
    global_optimum,
    limit_case,
    solve_case,
    solve_multiply,
    solve_simply,
    validate_packing,
)
from .screw_group import GroupContext, ScrewElement, appendix_image, orbit_neighbors

__version__ = "0.1.0"

__all__ = [
    "GeodesicShot",
    "GroupContext",
    "H2Isometry",
    "H2Point",
    "H2xRPoint",
    "InvalidPointError",
    "KernelSite",
    "LimitEstimate",
    "NoConvergenceError",
    "NonHyperbolicSignatureError",
    "OverlapError",
    "PackingError",
    "PackingSolution",
    "ScrewElement",
    "Site",
    "SweepReport",
    "TranslationClass",
    "UnsolvedCaseError",
    "appendix_image",
    "ball_volume",
    "brute_force_congruences",
    "enumerate_multiply",
    "enumerate_simply",
    "fundamental_domain_area",
    "geodesic_point",
    "global_optimum",
    "h2_distance",
    "h2xr_distance",
    "limit_case",
    "orbit_neighbors",
    "solve_case",
    "solve_multiply",
    "solve_shot",
    "solve_simply",
    "triangle_vertices",
    "validate_packing",
]
