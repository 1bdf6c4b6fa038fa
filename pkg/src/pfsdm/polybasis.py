"""Bivariate polynomial surrogates on the domain Omega = (-1,1)^2.

The basis is the tensor product of Legendre polynomials P_i(x) * P_j(y).
Legendre spans the same space as raw monomials of the same degree but keeps
Vandermonde-style systems well conditioned up to degree ~24, which raw
monomials do not. Coefficient tables are dense (degree+1) x (degree+1)
arrays indexed [x-degree, y-degree].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned

DEFAULT_RIDGE = 1e-10


def legendre_block(x: np.ndarray, degree: int, derivs: int = 0) -> list[np.ndarray]:
    """Legendre values P_0..P_degree (and derivatives) at the points x.

    Returns a list of (len(x), degree+1) arrays: values, then first and
    second derivative tables when ``derivs`` asks for them. Uses the Bonnet
    three-term recurrence and its derivative forms, which are numerically
    stable on [-1,1] far beyond the degrees used here.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cols = degree + 1
    v = np.empty((x.size, cols))
    v[:, 0] = 1.0
    if cols > 1:
        v[:, 1] = x
    for k in range(1, degree):
        v[:, k + 1] = ((2 * k + 1) * x * v[:, k] - k * v[:, k - 1]) / (k + 1)
    out = [v]
    if derivs >= 1:
        dv = np.zeros_like(v)
        if cols > 1:
            dv[:, 1] = 1.0
        for k in range(1, degree):
            # P'_{k+1} = P'_{k-1} + (2k+1) P_k
            dv[:, k + 1] = dv[:, k - 1] + (2 * k + 1) * v[:, k]
        out.append(dv)
    if derivs >= 2:
        ddv = np.zeros_like(v)
        for k in range(1, degree):
            ddv[:, k + 1] = ddv[:, k - 1] + (2 * k + 1) * out[1][:, k]
        out.append(ddv)
    return out


def design_matrix(points: np.ndarray, degree: int, dx: int = 0, dy: int = 0) -> np.ndarray:
    """Rows of tensor-basis (derivative) values, one row per point.

    Column order matches a row-major flattening of the coefficient table,
    i.e. column i*(degree+1)+j holds d^dx P_i(x) * d^dy P_j(y).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    bx = legendre_block(pts[:, 0], degree, derivs=dx)[dx]
    by = legendre_block(pts[:, 1], degree, derivs=dy)[dy]
    n = pts.shape[0]
    return (bx[:, :, None] * by[:, None, :]).reshape(n, (degree + 1) ** 2)


@dataclass(eq=False)
class PolySurrogate:
    """Dense tensor-Legendre polynomial with coefficient table coeffs[i, j]."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        want = (self.degree + 1, self.degree + 1)
        if self.coeffs.shape != want:
            raise ValueError(f"coefficient table must have shape {want}, got {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zero(cls, degree: int) -> "PolySurrogate":
        return cls(degree, np.zeros((degree + 1, degree + 1)))

    def _contract(self, points: np.ndarray, dx: int, dy: int) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        bx = legendre_block(pts[:, 0], self.degree, derivs=dx)[dx]
        by = legendre_block(pts[:, 1], self.degree, derivs=dy)[dy]
        return np.sum((bx @ self.coeffs) * by, axis=1)

    def value_at(self, points: np.ndarray) -> np.ndarray:
        return self._contract(points, 0, 0)

    def grad_at(self, points: np.ndarray) -> np.ndarray:
        """(n, 2) array of gradients at the given points."""
        return np.stack([self._contract(points, 1, 0), self._contract(points, 0, 1)], axis=1)

    def second_derivs_at(self, points: np.ndarray) -> np.ndarray:
        """(n, 3) array of (d_xx, d_xy, d_yy) at the given points."""
        return np.stack(
            [
                self._contract(points, 2, 0),
                self._contract(points, 1, 1),
                self._contract(points, 0, 2),
            ],
            axis=1,
        )

    def laplacian_at(self, points: np.ndarray) -> np.ndarray:
        return self._contract(points, 2, 0) + self._contract(points, 0, 2)

    # Scalar convenience wrappers.
    def value(self, q) -> float:
        return float(self.value_at(np.asarray(q, dtype=float)[None, :])[0])

    def grad(self, q) -> tuple[float, float]:
        g = self.grad_at(np.asarray(q, dtype=float)[None, :])[0]
        return float(g[0]), float(g[1])

    def laplacian(self, q) -> float:
        return float(self.laplacian_at(np.asarray(q, dtype=float)[None, :])[0])

    def __call__(self, q) -> float:
        return self.value(q)


@dataclass(eq=False)
class QuadratureGrid:
    """Area quadrature nodes and weights over Omega; weights sum to 4."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise ValueError("nodes must be an (n, 2) array")
        if self.weights.shape != (self.nodes.shape[0],):
            raise ValueError("weights must match node count")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.abs(self.nodes) >= 1.0):
            raise ValueError("nodes must lie strictly inside (-1,1)^2")

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


@dataclass(eq=False)
class LineQuadrature:
    """Arc-length quadrature along a closed polyline; weights sum to perimeter."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def gauss_grid(q_per_axis: int) -> QuadratureGrid:
    """Tensor Gauss-Legendre grid on (-1,1)^2.

    Exact for polynomials of degree <= 2*q_per_axis - 1 per axis.
    """
    if q_per_axis < 4:
        raise ValueError("q_per_axis must be >= 4")
    x, w = np.polynomial.legendre.leggauss(q_per_axis)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    wx, wy = np.meshgrid(w, w, indexing="ij")
    nodes = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return QuadratureGrid(nodes, (wx * wy).ravel())


def line_quadrature(contour) -> LineQuadrature:
    """Trapezoidal arc-length weights on the contour's points.

    Each point receives half the length of its two incident edges, so the
    weights sum to the polygon perimeter exactly.
    """
    pts = contour.points
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    weights = 0.5 * (lengths + np.roll(lengths, 1))
    return LineQuadrature(pts.copy(), weights)


def fit_least_squares(
    points: np.ndarray,
    values: np.ndarray,
    degree: int,
    ridge: float = DEFAULT_RIDGE,
) -> PolySurrogate:
    """Ridge-regularized least-squares polynomial fit.

    Minimizes sum (p(q_i) - v_i)^2 + ridge * ||coeffs||^2. With ridge == 0 a
    rank-deficient or underdetermined system raises IllConditioned instead of
    silently picking a minimum-norm solution.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.asarray(values, dtype=float).ravel()
    if pts.shape[0] != vals.shape[0]:
        raise ValueError("points and values must have matching lengths")
    n_coef = (degree + 1) ** 2
    if pts.shape[0] < n_coef:
        raise IllConditioned(
            f"{pts.shape[0]} targets cannot determine {n_coef} coefficients"
        )
    basis = design_matrix(pts, degree)
    if ridge == 0.0:
        coef, _, rank, _ = np.linalg.lstsq(basis, vals, rcond=None)
        if rank < n_coef:
            raise IllConditioned(f"normal system rank {rank} < {n_coef}")
    else:
        gram = basis.T @ basis
        gram[np.diag_indices_from(gram)] += ridge
        coef = np.linalg.solve(gram, basis.T @ vals)
    return PolySurrogate(degree, coef.reshape(degree + 1, degree + 1))
