"""Computational convex-geometry lab: polar duality, Santalo points,
volume products, Steiner symmetrization and shadow systems for polytopes
in dimensions 2 and 3."""

from .errors import (
    BadSpec,
    BaseMismatch,
    DegenerateInput,
    DimensionMismatch,
    GeometryError,
    NoConvergence,
    NotInterior,
    OutsideProjection,
    ParamOutOfRange,
    ParseError,
    TooFewChords,
    UnsupportedDimension,
    ZeroDelta,
)
from .geometry import (
    Cell,
    Interval,
    Polytope,
    Subdivision,
    basis_orthogonal,
    canonicalize,
    centroid,
    chord,
    chord_structure,
    diameter,
    hausdorff_distance,
    overlay,
    project,
    volume,
)
from .duality import (
    ProductReport,
    SantaloResult,
    ball_volume,
    polar,
    santalo_point,
    volume_product,
)
from .symmetrization import (
    AffineShear,
    ShadowSystem,
    SteinerFamily,
    fit_affine_shear,
    midpoint_deviation,
    reflect,
    steiner_snapshot,
    steiner_symmetral,
    vertex_shadow_snapshot,
)
from .experiments import (
    Certificate,
    EllipsoidTestResult,
    FlowRecord,
    ProbeReport,
    Profile,
    Verdict,
    convexity_profile,
    ellipsoid_test,
    generic_convexity_check,
    local_max_probe,
    symmetrization_flow,
    rigidity_certificate,
)
from .bodies import BodySpec, generate_body, read_body, write_body

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
