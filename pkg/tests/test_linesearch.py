import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from conftest import sampled
from voltdiff.errors import DegenerateDirectionError, NumericalError
from voltdiff.grid import SampledFunction, make_uniform_grid
from voltdiff.linesearch import brent_minimize, initial_step, quadratic_step, search
from voltdiff.objective import evaluate_G, l2_gradient
from voltdiff.sobolev import sobolev_gradient
from voltdiff.transform import transform_data


def along(psi, h, data):
    return lambda alpha: evaluate_G(psi - alpha * h, data)


class TestInitialStep:
    def test_minimises_quadratic(self, unit_grid, rng):
        d = transform_data(SampledFunction(unit_grid, rng.normal(size=unit_grid.n)))
        psi = SampledFunction(unit_grid, 0.0)
        h = l2_gradient(psi, d)
        a0 = initial_step(psi, h, d)
        f = along(psi, h, d)
        best = f(a0)
        for alpha in np.linspace(0, 3 * a0, 61):
            assert best <= f(alpha) * (1 + 1e-8)

    def test_zero_at_stationary_point(self, unit_grid):
        d = transform_data(sampled(unit_grid, lambda x: x))
        phi = SampledFunction(unit_grid, 1.0)
        h = SampledFunction(unit_grid, np.cos(np.pi * unit_grid.x))
        assert abs(initial_step(phi, h, d)) < 1e-12

    def test_golden_section_oracle(self, sine_grid):
        d = transform_data(sampled(sine_grid, lambda x: np.sin(x / 3)))
        psi = SampledFunction(sine_grid, 0.0)
        h = l2_gradient(psi, d)
        a0 = initial_step(psi, h, d)
        res = minimize_scalar(along(psi, h, d), bracket=(0.0, a0, 3 * a0), method="golden", tol=1e-10)
        assert a0 == pytest.approx(res.x, rel=1e-4)

    def test_positive_for_sobolev_direction(self, unit_grid, rng):
        d = transform_data(SampledFunction(unit_grid, rng.normal(size=unit_grid.n)))
        for _ in range(10):
            psi = SampledFunction(unit_grid, rng.normal(size=unit_grid.n))
            assert initial_step(psi, sobolev_gradient(l2_gradient(psi, d)), d) > 0.0

    def test_degenerate_direction(self, unit_grid):
        d = transform_data(sampled(unit_grid, np.exp))
        z = SampledFunction(unit_grid, 0.0)
        with pytest.raises(DegenerateDirectionError):
            quadratic_step(1.0, 0.0)
        assert quadratic_step(0.0, 0.0) == 0.0
        # the zero direction has no slope either, so there is nothing to fix
        assert initial_step(z, z, d) == 0.0


class TestSearch:
    def test_unit_minimum(self):
        res = search(lambda a: (a - 1.0) ** 2, 1.0)
        assert abs(res.alpha - 1.0) <= 1e-6

    def test_expansion(self):
        res = search(lambda a: (a - 3.0) ** 2, 1.0)
        assert abs(res.alpha - 3.0) <= 1e-6

    @pytest.mark.parametrize("f", [lambda a: a, lambda a: math.exp(a), lambda a: a**3 + a])
    def test_increasing(self, f):
        res = search(f, 1.0)
        assert 0.0 <= res.alpha <= 1.0
        assert res.f_alpha <= f(0.0)

    @pytest.mark.parametrize("target", [0.01, 0.37, 0.9, 2.5, 7.2])
    def test_shrink_and_expand(self, target):
        res = search(lambda a: (a - target) ** 2 + 1.0, 1.0)
        assert abs(res.alpha - target) <= 1e-6 * target + 1e-9
        assert res.evals <= 100

    def test_non_quadratic(self):
        f = lambda a: math.cosh(a - 2.0)
        res = search(f, 0.5)
        assert abs(res.alpha - 2.0) <= 1e-5

    def test_monotone(self, rng):
        for _ in range(50):
            c, s = rng.uniform(0.1, 5), rng.uniform(-2, 4)
            f = lambda a: c * (a - s) ** 2
            res = search(f, rng.uniform(0.1, 3))
            assert res.alpha >= 0.0
            assert res.f_alpha <= f(0.0)

    def test_non_finite_value(self):
        def f(a):
            return math.inf if a > 1.5 else (a - 5.0) ** 2

        with pytest.raises(NumericalError) as info:
            search(f, 1.0)
        assert info.value.alpha == 2.0

    def test_non_finite_at_zero(self):
        with pytest.raises(NumericalError):
            search(lambda a: math.nan, 1.0)

    @pytest.mark.parametrize("alpha0", [0.0, -1.0, math.inf, math.nan])
    def test_bad_initial_step(self, alpha0):
        with pytest.raises(NumericalError):
            search(lambda a: a * a, alpha0)

    def test_quadratic_g_accepts_initial_step(self, rng):
        for grid in (make_uniform_grid(0, 1, 101), make_uniform_grid(0, 3 * np.pi, 944)):
            d = transform_data(SampledFunction(grid, rng.normal(size=grid.n)))
            for _ in range(5):
                psi = SampledFunction(grid, rng.normal(size=grid.n))
                h = sobolev_gradient(l2_gradient(psi, d))
                a0 = initial_step(psi, h, d)
                f = along(psi, h, d)
                res = search(f, a0, f0=f(0.0))
                assert res.alpha == pytest.approx(a0, rel=1e-4)
                assert res.evals <= 5


def test_brent_against_scipy():
    f = lambda a: (a - 0.3) ** 4 + 0.1 * (a - 0.3) ** 2
    x, fx, evals = brent_minimize(f, -1.0, 2.0, abs_tol=1e-12)
    ref = minimize_scalar(f, bounds=(-1.0, 2.0), method="bounded", options={"xatol": 1e-12})
    assert abs(x - ref.x) < 1e-4
    assert fx <= ref.fun + 1e-12
    assert evals <= 100
