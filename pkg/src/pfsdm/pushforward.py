"""Deformation map from the unit disk onto a shape, and the pushed SDF field.

The displacement field (disp_x, disp_y) is fit so that a point b on the unit
circle moves to b + disp(b) ~ the contour sample whose closest-point
projection is b. Interior regularization targets shrink the displacement
linearly toward zero at the disk center, which makes the fit well posed off
the circle and turns the map into a disk-to-shape homotopy.

The pushed field evaluates the solved signed-distance surrogate at
Psi(theta, r) = r*(cos t, sin t) + disp(r cos t, r sin t); its angular
derivatives come from the chain rule with the analytic polynomial gradients
and Hessians, so they can be checked against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eikonal import SdfModel
from .errors import OutOfDomain, UndefinedProjection
from .polybasis import DEFAULT_RIDGE, PolySurrogate, fit_least_squares
from .shapes import Contour, signed_distance_oracle_many

# Fractions of the way to the circle at which interior displacement targets
# sit. One ring per tenth: sparser sets leave a degree-10 polynomial free to
# oscillate between rings, which pushes Psi outside the domain.
INTERIOR_RADII = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

# zero_residual above this marks a likely non-invertible map.
INVERTIBILITY_LIMIT = 0.1

ZERO_RESIDUAL_SAMPLES = 512


def closest_point_circle(q) -> np.ndarray:
    """Radial projection of q onto the unit circle."""
    q = np.asarray(q, dtype=float)
    norm = math.hypot(q[0], q[1])
    if norm < 1e-12:
        raise UndefinedProjection("projection of the origin onto the circle is ambiguous")
    return q / norm


@dataclass(eq=False)
class PushForwardMap:
    """Displacement polynomials moving the unit disk onto a shape."""

    disp_x: PolySurrogate
    disp_y: PolySurrogate
    zero_residual: float
    contour_id: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.zero_residual) and self.zero_residual >= 0.0):
            raise ValueError("zero_residual must be finite and nonnegative")

    @property
    def invertibility_warning(self) -> bool:
        return self.zero_residual > INVERTIBILITY_LIMIT

    def push(self, points: np.ndarray) -> np.ndarray:
        """Psi applied to reference-disk points (n, 2)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        disp = np.stack([self.disp_x.value_at(pts), self.disp_y.value_at(pts)], axis=1)
        return pts + disp


def fit_deformation(c: Contour, m: int = 10, ridge: float = DEFAULT_RIDGE) -> PushForwardMap:
    """Least-squares displacement fit for a normalized (origin-centered) contour.

    Per contour sample s with circle projection b = s/|s|, the targets are
    disp(r*b) = r*(s - b) for r in {1} + INTERIOR_RADII plus disp(0,0) = 0,
    so the fitted map approximates the linear homotopy r -> r*s(theta).
    The recorded zero_residual is the largest brute-force distance from
    Psi(theta, 1) back to the contour over a uniform theta grid, i.e. how far
    the mapped unit circle misses the shape boundary.
    """
    centroid = c.centroid()
    if math.hypot(centroid[0], centroid[1]) > 0.05 * c.max_radius():
        raise ValueError("deformation fit requires a centered (normalized) contour")
    s = c.points
    norms = np.hypot(s[:, 0], s[:, 1])
    if np.any(norms < 1e-12):
        raise UndefinedProjection("contour passes through the disk center")
    b = s / norms[:, None]
    d = s - b

    pts = [b]
    targets = [d]
    for r in INTERIOR_RADII:
        pts.append(r * b)
        targets.append(r * d)
    pts.append(np.zeros((1, 2)))
    targets.append(np.zeros((1, 2)))
    pts = np.vstack(pts)
    targets = np.vstack(targets)

    disp_x = fit_least_squares(pts, targets[:, 0], m, ridge=ridge)
    disp_y = fit_least_squares(pts, targets[:, 1], m, ridge=ridge)

    thetas = np.arange(ZERO_RESIDUAL_SAMPLES) * (2.0 * math.pi / ZERO_RESIDUAL_SAMPLES)
    ring = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    pushed = ring + np.stack([disp_x.value_at(ring), disp_y.value_at(ring)], axis=1)
    residual = float(np.max(np.abs(signed_distance_oracle_many(pushed, c))))
    return PushForwardMap(disp_x, disp_y, residual, contour_id=c.contour_id)


@dataclass(eq=False)
class PfSdfField:
    """Signed-distance surrogate re-parametrized over the unit disk."""

    sdf: SdfModel
    deformation: PushForwardMap

    def __post_init__(self):
        if self.sdf.contour_id != self.deformation.contour_id:
            raise ValueError(
                "sdf and deformation come from different contours: "
                f"{self.sdf.contour_id!r} vs {self.deformation.contour_id!r}"
            )

    @property
    def contour_id(self) -> str:
        return self.sdf.contour_id

    def _reference(self, thetas: np.ndarray, rs: np.ndarray):
        """Flattened (R*T, 2) disk points for an (rs x thetas) grid."""
        t = np.asarray(thetas, dtype=float)
        r = np.asarray(rs, dtype=float)
        ct, st = np.cos(t), np.sin(t)
        px = np.outer(r, ct)
        py = np.outer(r, st)
        return np.stack([px.ravel(), py.ravel()], axis=1), ct, st

    def _pushed(self, pts: np.ndarray) -> np.ndarray:
        pushed = self.deformation.push(pts)
        if np.any(np.abs(pushed) > 1.0 + 1e-12):
            worst = float(np.max(np.abs(pushed)))
            raise OutOfDomain(f"pushed point leaves the domain (max |coord| {worst:.4f})")
        return pushed

    def value_grid(self, thetas, rs) -> np.ndarray:
        """Field values on an (len(rs), len(thetas)) grid."""
        pts, _, _ = self._reference(thetas, rs)
        vals = self.sdf.poly.value_at(self._pushed(pts))
        return vals.reshape(len(np.atleast_1d(rs)), len(np.atleast_1d(thetas)))

    def dtheta_grid(self, thetas, rs, order: int = 1) -> np.ndarray:
        """Analytic d/dtheta (order 1 or 2) of the field on a grid.

        Chain rule through Psi: with p = r(cos t, sin t), dp = (-p_y, p_x) and
        d2p = -p,
            dPsi  = (I + Dnu(p)) dp
            d2Psi = (I + Dnu(p)) d2p + D2nu(p)[dp, dp]
            d(field)  = grad(sdf) . dPsi
            d2(field) = dPsi^T H(sdf) dPsi + grad(sdf) . d2Psi
        """
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        t = np.atleast_1d(np.asarray(thetas, dtype=float))
        r = np.atleast_1d(np.asarray(rs, dtype=float))
        pts, _, _ = self._reference(t, r)
        pushed = self._pushed(pts)

        dp = np.stack([-pts[:, 1], pts[:, 0]], axis=1)
        gx = self.deformation.disp_x.grad_at(pts)
        gy = self.deformation.disp_y.grad_at(pts)
        dpsi_x = (1.0 + gx[:, 0]) * dp[:, 0] + gx[:, 1] * dp[:, 1]
        dpsi_y = gy[:, 0] * dp[:, 0] + (1.0 + gy[:, 1]) * dp[:, 1]

        grad_u = self.sdf.poly.grad_at(pushed)
        if order == 1:
            out = grad_u[:, 0] * dpsi_x + grad_u[:, 1] * dpsi_y
            return out.reshape(r.size, t.size)

        d2p = -pts
        hx = self.deformation.disp_x.second_derivs_at(pts)
        hy = self.deformation.disp_y.second_derivs_at(pts)
        quad_x = hx[:, 0] * dp[:, 0] ** 2 + 2.0 * hx[:, 1] * dp[:, 0] * dp[:, 1] + hx[:, 2] * dp[:, 1] ** 2
        quad_y = hy[:, 0] * dp[:, 0] ** 2 + 2.0 * hy[:, 1] * dp[:, 0] * dp[:, 1] + hy[:, 2] * dp[:, 1] ** 2
        d2psi_x = quad_x + (1.0 + gx[:, 0]) * d2p[:, 0] + gx[:, 1] * d2p[:, 1]
        d2psi_y = quad_y + gy[:, 0] * d2p[:, 0] + (1.0 + gy[:, 1]) * d2p[:, 1]

        hu = self.sdf.poly.second_derivs_at(pushed)
        out = (
            hu[:, 0] * dpsi_x**2
            + 2.0 * hu[:, 1] * dpsi_x * dpsi_y
            + hu[:, 2] * dpsi_y**2
            + grad_u[:, 0] * d2psi_x
            + grad_u[:, 1] * d2psi_y
        )
        return out.reshape(r.size, t.size)

    def value(self, theta: float, r: float) -> float:
        return float(self.value_grid([theta], [r])[0, 0])

    def dtheta(self, theta: float, r: float, order: int = 1) -> float:
        return float(self.dtheta_grid([theta], [r], order=order)[0, 0])


def pf_sdf_eval(field: PfSdfField, theta: float, r: float) -> float:
    return field.value(theta, r)


def pf_sdf_dtheta(field: PfSdfField, theta: float, r: float, order: int = 1) -> float:
    return field.dtheta(theta, r, order=order)
