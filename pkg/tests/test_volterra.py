import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sampled, sup
from voltdiff.grid import SampledFunction, cumulative_integral, integral, l2_inner, l2_norm, make_uniform_grid
from voltdiff.volterra import (
    adjoint_T,
    adjoint_TD,
    apply_T,
    apply_T_star,
    apply_TD,
    apply_TD_star,
)

THREE_PI = make_uniform_grid(0.0, 3 * np.pi, 944)


def dense(op, grid):
    """Matrix of ``op`` acting on nodal values."""
    cols = []
    for j in range(grid.n):
        e = np.zeros(grid.n)
        e[j] = 1.0
        cols.append(op(SampledFunction(grid, e)).values)
    return np.column_stack(cols)


class TestTD:
    def test_zero(self, unit_grid):
        assert sup(apply_TD(SampledFunction(unit_grid, 0.0)).values) == 0.0

    def test_one(self, unit_grid):
        assert sup(apply_TD(SampledFunction(unit_grid, 1.0)).values, unit_grid.x) < 1e-14

    def test_cosine(self):
        out = apply_TD(sampled(THREE_PI, lambda x: np.cos(x / 3) / 3))
        assert sup(out.values, np.sin(THREE_PI.x / 3)) < 1e-5

    def test_matches_cumulative_integral(self, unit_grid, rng):
        f = SampledFunction(unit_grid, rng.normal(size=unit_grid.n))
        assert np.array_equal(apply_TD(f).values, cumulative_integral(f).values)
        assert apply_TD(f).values[0] == 0.0


class TestTDStar:
    def test_zero(self, unit_grid):
        assert sup(apply_TD_star(SampledFunction(unit_grid, 0.0)).values) == 0.0

    def test_one(self, unit_grid):
        assert sup(apply_TD_star(SampledFunction(unit_grid, 1.0)).values, 1 - unit_grid.x) < 1e-14

    def test_cosine(self):
        out = apply_TD_star(sampled(THREE_PI, lambda x: np.cos(x / 3) / 3))
        assert sup(out.values, -np.sin(THREE_PI.x / 3)) < 1e-5

    def test_definition(self, unit_grid, rng):
        f = SampledFunction(unit_grid, rng.normal(size=unit_grid.n))
        star = apply_TD_star(f).values
        assert star[-1] == 0.0
        assert sup(star, integral(f) - cumulative_integral(f).values) < 1e-14
        # the two integrals add up to the same constant everywhere
        assert sup(apply_TD(f).values + star, integral(f)) < 1e-14


class TestT:
    def test_one(self):
        g = make_uniform_grid(-0.7, 1.3, 41)
        assert sup(apply_T(SampledFunction(g, 1.0)).values, 2 * g.x - g.a - g.b) < 1e-13

    def test_zero(self, unit_grid):
        assert sup(apply_T(SampledFunction(unit_grid, 0.0)).values) == 0.0

    def test_cosine_gives_g3(self):
        out = apply_T(sampled(THREE_PI, lambda x: np.cos(x / 3) / 3))
        assert sup(out.values, 2 * np.sin(THREE_PI.x / 3)) < 2e-5

    def test_difference(self, unit_grid, rng):
        f = SampledFunction(unit_grid, rng.normal(size=unit_grid.n))
        assert sup(apply_T(f).values, (apply_TD(f) - apply_TD_star(f)).values) < 1e-14

    def test_end_symmetry(self, unit_grid, rng):
        f = SampledFunction(unit_grid, rng.normal(size=unit_grid.n))
        out = apply_T(f).values
        assert out[0] == -out[-1]


class TestTStar:
    def test_zero(self, unit_grid):
        assert sup(apply_T_star(SampledFunction(unit_grid, 0.0)).values) == 0.0

    def test_one(self):
        g = make_uniform_grid(-0.7, 1.3, 41)
        assert sup(apply_T_star(SampledFunction(g, 1.0)).values, g.a + g.b - 2 * g.x) < 1e-13

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=3, max_value=50))
    def test_negates_T(self, seed, n):
        g = make_uniform_grid(0.0, 2.0, n)
        f = SampledFunction(g, np.random.default_rng(seed).normal(size=n))
        assert np.array_equal(apply_T_star(f).values + apply_T(f).values, np.zeros(n))

    def test_dense_negation(self):
        g = make_uniform_grid(-1.0, 0.5, 23)
        assert np.array_equal(dense(apply_T_star, g), -dense(apply_T, g))


class TestAdjointness:
    """Transposition under the trapezoid inner product ``<f, k> = f^T W k``."""

    @pytest.mark.parametrize("n", [3, 4, 10, 25, 50])
    def test_TD_star_is_weighted_transpose(self, n):
        # literal requirement: W * TD == (W * TD_star)^T
        g = make_uniform_grid(0.0, 1.0, n)
        W = np.diag(g.weights)
        lhs = W @ dense(apply_TD, g)
        rhs = (W @ dense(apply_TD_star, g)).T
        assert sup(lhs, rhs) <= 1e-10 * sup(lhs)

    @pytest.mark.parametrize("n", [3, 4, 10, 25, 50])
    def test_TD_star_mismatch_is_corner_only(self, n):
        g = make_uniform_grid(0.0, 1.0, n)
        W = np.diag(g.weights)
        diff = W @ dense(apply_TD, g) - (W @ dense(apply_TD_star, g)).T
        expected = np.zeros((n, n))
        expected[0, 0] = -g.h**2 / 4
        expected[-1, -1] = g.h**2 / 4
        assert sup(diff, expected) < 1e-15

    @pytest.mark.parametrize("n", [3, 4, 10, 25, 50])
    def test_exact_adjoints(self, n):
        g = make_uniform_grid(-0.5, 1.5, n)
        W = np.diag(g.weights)
        for op, adj in ((apply_TD, adjoint_TD), (apply_T, adjoint_T)):
            lhs = W @ dense(op, g)
            rhs = (W @ dense(adj, g)).T
            assert sup(lhs, rhs) <= 1e-14 * sup(lhs)

    def test_random_pairs(self, rng):
        g = make_uniform_grid(0.0, 3.0, 50)
        for _ in range(20):
            h = SampledFunction(g, rng.normal(size=g.n))
            f = SampledFunction(g, rng.normal(size=g.n))
            scale = l2_norm(h) * l2_norm(f)
            assert abs(l2_inner(apply_TD(h), f) - l2_inner(h, adjoint_TD(f))) <= 1e-12 * scale
            assert abs(l2_inner(apply_T(h), f) - l2_inner(h, adjoint_T(f))) <= 1e-12 * scale
            # the continuum-style adjoint is off by O(h^2) only
            gap = abs(l2_inner(apply_TD(h), f) - l2_inner(h, apply_TD_star(f)))
            assert gap <= g.h**2 / 2 * np.max(np.abs(h.values)) * np.max(np.abs(f.values))


class TestBoundsAndKernel:
    def test_bounded(self, rng):
        for n, (a, b) in [(11, (0, 1)), (101, (-0.5, 0.5)), (300, (0, 3 * np.pi))]:
            g = make_uniform_grid(a, b, n)
            for _ in range(10):
                psi = SampledFunction(g, rng.normal(size=n))
                assert l2_norm(apply_T(psi)) <= 2 * (b - a) * l2_norm(psi)

    def test_least_norm_solution_of_zero_data(self):
        g = make_uniform_grid(0.0, 1.0, 20)
        psi, *_ = np.linalg.lstsq(dense(apply_T, g), np.zeros(g.n), rcond=None)
        assert sup(psi) == 0.0

    @pytest.mark.parametrize("n", [4, 5, 10, 11, 30, 49])
    def test_kernel_is_grid_oscillation(self, n):
        # trapezoid sums annihilate the alternating vector; it is the only
        # kernel direction and is invisible to smooth test functions
        g = make_uniform_grid(0.0, 1.0, n)
        M = dense(apply_T, g)
        _, s, vt = np.linalg.svd(M)
        assert s[-1] < 1e-12 * s[0]
        assert s[-2] > 1e-6 * s[0]
        alt = (-1.0) ** np.arange(n)
        assert abs(abs(vt[-1] @ alt) / np.linalg.norm(alt) - 1.0) < 1e-10
        smooth = np.cos(np.pi * g.x)
        assert abs(l2_inner(SampledFunction(g, alt), SampledFunction(g, smooth))) < 2 * g.h
