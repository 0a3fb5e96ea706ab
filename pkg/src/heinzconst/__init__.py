"""Birkhoff-orthogonality geometric constants of planar normed spaces."""

from .birkhoff import (
    CompanionArc,
    MinimizeResult,
    OrthoPair,
    companion_arcs,
    defect,
    is_orthogonal,
    minimize_lambda,
)
from .constants import (
    ConstantEstimate,
    ConstantKind,
    GridParams,
    NonSquareClass,
    classify_nonsquare,
    estimate_constant,
    heinz_mean,
    pair_objective,
    radon_defect,
)
from .normed_plane import (
    Norm,
    SpherePoint,
    builtin_norm,
    evaluate,
    parse_norm_spec,
    polygon_norm,
    serialize_norm,
    sphere_point,
)
from .verify import VerificationReport, hexagon_family_check, run_checks

__version__ = "0.1.0"
