"""Volterra integration operators on sampled functions.

``apply_TD`` integrates from the left end, ``apply_TD_star`` from the right
end, and ``apply_T`` is their difference, which weighs both endpoints alike.
``apply_TD_star`` is built as ``integral(f) - cumulative_integral(f)`` so that
``apply_TD(f) + apply_TD_star(f)`` is exactly the constant ``integral(f)``.

With composite trapezoid weights this continuum-style ``apply_TD_star`` is
not the exact matrix transpose of ``apply_TD``: the two differ in the corner
entries by ``h**2 / 4``.  Gradients need the exact transpose, which is
provided by :func:`adjoint_TD` and :func:`adjoint_T`.
"""

import numpy as np

from . import _kernels
from .grid import SampledFunction


def td(values, h):
    return _kernels.cumtrapz(values, h)


def td_star(values, h):
    running = _kernels.cumtrapz(values, h)
    return running[-1] - running


def t_op(values, h):
    running = _kernels.cumtrapz(values, h)
    return 2.0 * running - running[-1]


def td_adjoint(values, h):
    return _kernels.cumtrapz_adjoint(values, h)


def t_adjoint(values, h, weights):
    # T = 2 C - 1 w^T, so its weighted transpose is 2 C^# - 1 (w . v)
    return 2.0 * _kernels.cumtrapz_adjoint(values, h) - float(np.dot(weights, values))


def apply_TD(psi: SampledFunction) -> SampledFunction:
    """``x -> int_a^x psi``."""
    return SampledFunction(psi.grid, td(psi.values, psi.grid.h))


def apply_TD_star(f: SampledFunction) -> SampledFunction:
    """``x -> int_x^b f``."""
    return SampledFunction(f.grid, td_star(f.values, f.grid.h))


def apply_T(psi: SampledFunction) -> SampledFunction:
    """``x -> int_a^x psi - int_x^b psi``."""
    return SampledFunction(psi.grid, t_op(psi.values, psi.grid.h))


def apply_T_star(f: SampledFunction) -> SampledFunction:
    """Continuum adjoint of :func:`apply_T`, which is ``-apply_T``."""
    return SampledFunction(f.grid, -t_op(f.values, f.grid.h))


def adjoint_TD(f: SampledFunction) -> SampledFunction:
    """Exact transpose of :func:`apply_TD` under the trapezoid inner product.

    Agrees with :func:`apply_TD_star` except at the two end nodes, where
    they differ by ``h/2`` times the end value of ``f``.
    """
    return SampledFunction(f.grid, td_adjoint(f.values, f.grid.h))


def adjoint_T(f: SampledFunction) -> SampledFunction:
    """Exact transpose of :func:`apply_T` under the trapezoid inner product."""
    grid = f.grid
    return SampledFunction(grid, t_adjoint(f.values, grid.h, grid.weights))
