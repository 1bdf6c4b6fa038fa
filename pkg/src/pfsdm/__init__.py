"""Push-forward signed-distance morphometrics for closed 2-D contours."""

from .config import RunConfig
from .eikonal import SdfModel, SolverConfig, init_sdf, solve_eikonal
from .moments import (
    DistanceMatrix,
    MomentCurves,
    NormalizingConstants,
    angular_moments,
    curvature,
    distance_matrix,
    normalizing_constants,
    pf_sdm_distance,
)
from .polybasis import (
    LineQuadrature,
    PolySurrogate,
    QuadratureGrid,
    fit_least_squares,
    gauss_grid,
    line_quadrature,
)
from .pushforward import PfSdfField, PushForwardMap, closest_point_circle, fit_deformation
from .shapes import (
    SHAPE_KINDS,
    SHAPE_LABELS,
    AugmentParams,
    Contour,
    RasterImage,
    augment,
    extract_contour,
    generate_shape,
    normalize_contour,
    resample_contour,
    signed_distance_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentParams",
    "Contour",
    "DistanceMatrix",
    "LineQuadrature",
    "MomentCurves",
    "NormalizingConstants",
    "PfSdfField",
    "PolySurrogate",
    "PushForwardMap",
    "QuadratureGrid",
    "RasterImage",
    "RunConfig",
    "SHAPE_KINDS",
    "SHAPE_LABELS",
    "SdfModel",
    "SolverConfig",
    "angular_moments",
    "augment",
    "closest_point_circle",
    "curvature",
    "distance_matrix",
    "extract_contour",
    "fit_deformation",
    "fit_least_squares",
    "gauss_grid",
    "generate_shape",
    "init_sdf",
    "line_quadrature",
    "normalize_contour",
    "normalizing_constants",
    "pf_sdm_distance",
    "resample_contour",
    "signed_distance_oracle",
    "solve_eikonal",
    "__version__",
]
