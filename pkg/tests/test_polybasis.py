import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfsdm.errors import IllConditioned
from pfsdm.polybasis import (
    PolySurrogate,
    design_matrix,
    fit_least_squares,
    gauss_grid,
    line_quadrature,
)
from pfsdm.shapes import Contour, generate_shape


def poly_x2_plus_y(degree=2):
    # x^2 = (2 P2(x) + P0(x)) / 3, y = P1(y)
    c = np.zeros((degree + 1, degree + 1))
    c[0, 0] = 1.0 / 3.0
    c[2, 0] = 2.0 / 3.0
    c[0, 1] = 1.0
    return PolySurrogate(degree, c)


def random_poly(rng, degree):
    return PolySurrogate(degree, rng.standard_normal((degree + 1, degree + 1)))


class TestEval:
    def test_zero_polynomial(self):
        p = PolySurrogate.zero(3)
        rng = np.random.default_rng(0)
        assert np.all(p.value_at(rng.uniform(-1, 1, (20, 2))) == 0.0)

    def test_constant(self):
        c = np.zeros((2, 2))
        c[0, 0] = 3.0
        p = PolySurrogate(1, c)
        for q in [(-1, -1), (0.3, 0.7), (1, 1)]:
            assert p.value(q) == pytest.approx(3.0)

    def test_x2_plus_y(self):
        p = poly_x2_plus_y()
        assert p.value((0.5, 0.25)) == pytest.approx(0.5, abs=1e-14)

    def test_high_degree_stable(self):
        rng = np.random.default_rng(1)
        p = random_poly(rng, 24)
        vals = p.value_at(rng.uniform(-1, 1, (50, 2)))
        assert np.all(np.isfinite(vals))


class TestDerivatives:
    def test_grad_x2_plus_y(self):
        p = poly_x2_plus_y()
        gx, gy = p.grad((0.5, 0.0))
        assert gx == pytest.approx(1.0, abs=1e-14)
        assert gy == pytest.approx(1.0, abs=1e-14)

    def test_grad_constant(self):
        c = np.zeros((2, 2))
        c[0, 0] = 7.0
        p = PolySurrogate(1, c)
        assert p.grad((0.2, -0.4)) == (0.0, 0.0)

    def test_laplacian_x2_plus_y2(self):
        c = np.zeros((3, 3))
        c[0, 0] = 2.0 / 3.0
        c[2, 0] = 2.0 / 3.0
        c[0, 2] = 2.0 / 3.0
        p = PolySurrogate(2, c)
        for q in [(0, 0), (0.5, -0.3), (0.9, 0.9)]:
            assert p.laplacian(q) == pytest.approx(4.0, abs=1e-13)

    def test_laplacian_linear(self):
        c = np.zeros((2, 2))
        c[1, 0] = 2.0
        c[0, 1] = -1.0
        p = PolySurrogate(1, c)
        assert p.laplacian((0.3, 0.3)) == pytest.approx(0.0, abs=1e-14)

    def test_grad_matches_central_differences(self):
        rng = np.random.default_rng(42)
        h = 1e-5
        for _ in range(100):
            p = random_poly(rng, int(rng.integers(2, 9)))
            q = rng.uniform(-0.9, 0.9, 2)
            gx, gy = p.grad(q)
            fx = (p.value(q + [h, 0]) - p.value(q - [h, 0])) / (2 * h)
            fy = (p.value(q + [0, h]) - p.value(q - [0, h])) / (2 * h)
            scale = max(abs(gx), abs(gy), 1.0)
            assert abs(gx - fx) / scale < 1e-6
            assert abs(gy - fy) / scale < 1e-6

    def test_laplacian_matches_second_differences(self):
        rng = np.random.default_rng(43)
        h = 1e-4
        for _ in range(100):
            p = random_poly(rng, int(rng.integers(2, 9)))
            q = rng.uniform(-0.9, 0.9, 2)
            lap = p.laplacian(q)
            fxx = (p.value(q + [h, 0]) - 2 * p.value(q) + p.value(q - [h, 0])) / h**2
            fyy = (p.value(q + [0, h]) - 2 * p.value(q) + p.value(q - [0, h])) / h**2
            assert abs(lap - (fxx + fyy)) / max(abs(lap), 1.0) < 1e-4


class TestGaussGrid:
    def test_area(self):
        g = gauss_grid(8)
        assert g.integrate(np.ones(len(g.weights))) == pytest.approx(4.0, abs=1e-12)

    def test_x2y2(self):
        g = gauss_grid(8)
        vals = g.nodes[:, 0] ** 2 * g.nodes[:, 1] ** 2
        assert g.integrate(vals) == pytest.approx(4.0 / 9.0, abs=1e-12)

    def test_cosine_product(self):
        g = gauss_grid(16)
        vals = np.cos(g.nodes[:, 0]) * np.cos(g.nodes[:, 1])
        assert g.integrate(vals) == pytest.approx((2 * math.sin(1.0)) ** 2, abs=1e-10)

    def test_too_small(self):
        with pytest.raises(ValueError):
            gauss_grid(3)

    @pytest.mark.parametrize("q", [6, 10])
    def test_monomial_exactness(self, q):
        g = gauss_grid(q)
        for a in range(0, 2 * q - 1, 3):
            for b in range(0, 2 * q - 1, 3):
                got = g.integrate(g.nodes[:, 0] ** a * g.nodes[:, 1] ** b)
                if a % 2 or b % 2:
                    want = 0.0
                else:
                    want = (2.0 / (a + 1)) * (2.0 / (b + 1))
                assert got == pytest.approx(want, abs=1e-12 * max(1.0, abs(want)))


class TestLineQuadrature:
    def test_unit_square_corners(self):
        c = Contour(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
        lq = line_quadrature(c)
        assert np.allclose(lq.weights, 1.0)
        assert lq.weights.sum() == pytest.approx(4.0, abs=1e-12)

    def test_circle_perimeter(self):
        c = generate_shape("circle", 256, 0)
        lq = line_quadrature(c)
        assert lq.weights.sum() == pytest.approx(2 * math.pi * 0.7, rel=1e-3)

    def test_degenerate_contour_rejected(self):
        with pytest.raises(ValueError):
            Contour(np.array([[0.0, 0.0], [1.0, 0.0]]))


class TestFitLeastSquares:
    def test_exact_recovery(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-1, 1, (60, 2))
        vals = pts[:, 0] ** 2 + pts[:, 1]
        fit = fit_least_squares(pts, vals, 2, ridge=0.0)
        assert np.allclose(fit.coeffs, poly_x2_plus_y().coeffs, atol=1e-8)

    def test_underdetermined(self):
        rng = np.random.default_rng(6)
        pts = rng.uniform(-1, 1, (5, 2))
        with pytest.raises(IllConditioned):
            fit_least_squares(pts, np.ones(5), 2, ridge=0.0)

    def test_rank_deficient_zero_ridge(self):
        # 20 copies of 4 distinct points cannot pin 9 coefficients.
        pts = np.tile(np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]), (5, 1))
        with pytest.raises(IllConditioned):
            fit_least_squares(pts, np.ones(20), 2, ridge=0.0)

    def test_matches_normal_equation_oracle(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-1, 1, (40, 2))
        vals = 0.3 * pts[:, 0] - 0.8 * pts[:, 1] + rng.normal(0, 0.05, 40)
        fit = fit_least_squares(pts, vals, 1, ridge=0.0)
        # Independent oracle: dense normal equations on the same basis rows.
        basis = design_matrix(pts, 1)
        oracle = np.linalg.solve(basis.T @ basis, basis.T @ vals)
        assert np.allclose(fit.coeffs.ravel(), oracle, atol=1e-8)

    @given(st.integers(0, 10_000))
    @settings(max_examples=20)
    def test_residual_no_worse_than_zero_poly(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1, 1, (30, 2))
        vals = rng.normal(0, 1, 30)
        fit = fit_least_squares(pts, vals, 2)
        res = np.sum((fit.value_at(pts) - vals) ** 2)
        assert res <= np.sum(vals**2) + 1e-9
