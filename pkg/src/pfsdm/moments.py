"""Angular curvature moments of the pushed field and the shape distance.

At each reference radius r the field theta -> field(theta, r) is a periodic
curve; its graph curvature |f''| / (1 + f'^2)^(3/2) summarizes how the shape
modulates the distance field at that depth. Row 1 of a moment table is the
angular mean of that curvature; higher rows are centered angular moments.
Distances between shapes are normalized squared-L2 differences of moment
curves, which depend only on angular averages and are therefore insensitive
to rotations and reflections of the input shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCohort, IncompatibleCurves

DEFAULT_K = 3
DEFAULT_THETA_SAMPLES = 512
DEFAULT_R_SAMPLES = 64
# Radial range excludes the disk-center projection singularity and the
# residual noise right at the boundary ring.
R_RANGE = (0.05, 0.95)


def default_r_grid(n: int = DEFAULT_R_SAMPLES) -> np.ndarray:
    return np.linspace(R_RANGE[0], R_RANGE[1], n)


def default_thetas(n: int = DEFAULT_THETA_SAMPLES) -> np.ndarray:
    return np.arange(n) * (2.0 * math.pi / n)


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(0.5 * np.sum((y[1:] + y[:-1]) * np.diff(x)))


@dataclass(eq=False)
class MomentCurves:
    """K x R table of angular moments; row k-1 holds order k, row 0 the mean."""

    shape_id: str
    r_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.r_grid = np.asarray(self.r_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.r_grid.size:
            raise ValueError("values must be a (K, len(r_grid)) table")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("moment values must be finite")
        if np.any(self.r_grid <= 0.0) or np.any(self.r_grid >= 1.0):
            raise ValueError("r_grid must lie in (0, 1)")
        if np.any(self.values[0] < 0.0):
            raise ValueError("mean-curvature row must be nonnegative")
        for k in range(2, self.values.shape[0] + 1, 2):
            if np.any(self.values[k - 1] < 0.0):
                raise ValueError(f"even moment row {k} must be nonnegative")

    @property
    def k_max(self) -> int:
        return self.values.shape[0]

    def row(self, k: int) -> np.ndarray:
        """Moment curve of order k (1-based; row 1 is the angular mean)."""
        if not 1 <= k <= self.k_max:
            raise IncompatibleCurves(f"moment order {k} outside 1..{self.k_max}")
        return self.values[k - 1]


@dataclass(eq=False)
class NormalizingConstants:
    """Cohort-wide maxima m_k of |M^k| used to balance moment orders."""

    m: np.ndarray

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float)
        if np.any(self.m <= 0.0):
            raise DegenerateCohort("all moment normalizing constants must be positive")

    @property
    def k_max(self) -> int:
        return self.m.size


@dataclass(eq=False)
class DistanceMatrix:
    shape_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.shape_ids)
        if self.values.shape != (n, n):
            raise ValueError("distance matrix must be square over shape_ids")
        if np.any(self.values < 0.0):
            raise ValueError("distances must be nonnegative")
        if np.any(np.diag(self.values) != 0.0):
            raise ValueError("self-distances must be exactly zero")
        if np.max(np.abs(self.values - self.values.T)) > 1e-12:
            raise ValueError("distance matrix must be symmetric")


def curvature_grid(field, thetas, rs) -> np.ndarray:
    """Graph curvature of theta -> field(theta, r) on an (rs x thetas) grid.

    ``field`` needs dtheta_grid(thetas, rs, order); any object with that
    method works, which keeps closed-form test fields injectable.
    """
    d1 = field.dtheta_grid(thetas, rs, order=1)
    d2 = field.dtheta_grid(thetas, rs, order=2)
    return np.abs(d2) / (1.0 + d1 * d1) ** 1.5


def curvature(field, theta: float, r: float) -> float:
    return float(curvature_grid(field, [theta], [r])[0, 0])


def angular_moments(
    field,
    k_max: int = DEFAULT_K,
    r_grid: np.ndarray | None = None,
    theta_samples: int = DEFAULT_THETA_SAMPLES,
    shape_id: str | None = None,
) -> MomentCurves:
    """Centered angular moments of the curvature per radius.

    On the uniform periodic theta grid the trapezoidal rule reduces to the
    sample mean, so row 1 is mean(kappa) and row k >= 2 is the mean of
    (kappa - mean)^k, both spectrally accurate for smooth fields.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if theta_samples < 128:
        raise ValueError("need at least 128 angular samples")
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    if np.any(r_grid <= 0.0) or np.any(r_grid >= 1.0):
        raise ValueError("r_grid must lie in (0, 1)")
    thetas = default_thetas(theta_samples)
    kappa = curvature_grid(field, thetas, r_grid)
    mean = np.mean(kappa, axis=1)
    rows = [mean]
    centered = kappa - mean[:, None]
    for k in range(2, k_max + 1):
        rows.append(np.mean(centered**k, axis=1))
    if shape_id is None:
        shape_id = getattr(field, "contour_id", "")
    return MomentCurves(shape_id, r_grid, np.stack(rows))


def _require_same_grid(curves: list[MomentCurves]) -> None:
    first = curves[0]
    for c in curves[1:]:
        if c.k_max != first.k_max:
            raise IncompatibleCurves(f"moment order mismatch: {c.k_max} vs {first.k_max}")
        if c.r_grid.shape != first.r_grid.shape or not np.array_equal(c.r_grid, first.r_grid):
            raise IncompatibleCurves("radial grids differ across curves")


def normalizing_constants(curves: list[MomentCurves]) -> NormalizingConstants:
    """Per-order cohort maxima of |M^k| over all shapes and radii."""
    if not curves:
        raise ValueError("cohort must be nonempty")
    _require_same_grid(curves)
    stacked = np.stack([np.max(np.abs(c.values), axis=1) for c in curves])
    m = np.max(stacked, axis=0)
    if np.any(m == 0.0):
        dead = [k + 1 for k in np.nonzero(m == 0.0)[0]]
        raise DegenerateCohort(f"moment orders {dead} vanish over the whole cohort")
    return NormalizingConstants(m)


def pf_sdm_distance(
    a: MomentCurves,
    b: MomentCurves,
    consts: NormalizingConstants,
    k_order: int | None = None,
) -> float:
    """Sum over k of (1/m_k) * integral of (M^k_a - M^k_b)^2 dr."""
    _require_same_grid([a, b])
    k_order = consts.k_max if k_order is None else k_order
    if k_order > a.k_max or k_order > consts.k_max:
        raise IncompatibleCurves(f"order {k_order} exceeds available moment rows")
    total = 0.0
    for k in range(1, k_order + 1):
        diff = a.row(k) - b.row(k)
        total += _trapezoid(diff * diff, a.r_grid) / consts.m[k - 1]
    return total


def distance_matrix(
    curves: list[MomentCurves],
    consts: NormalizingConstants,
    k_order: int | None = None,
) -> DistanceMatrix:
    n = len(curves)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = pf_sdm_distance(curves[i], curves[j], consts, k_order)
            out[i, j] = d
            out[j, i] = d
    return DistanceMatrix(tuple(c.shape_id for c in curves), out)
