"""Neuberger (Sobolev) gradients and Polak-Ribiere conjugate directions.

The Sobolev gradient solves ``-g'' + g = grad_L2`` with second-order central
differences.  Neumann ends use a mirrored ghost node.  Scaling the end rows by
the trapezoid weight makes the system symmetric, so

    <g, grad_L2>  ==  h1_inner(g, g)

holds to rounding for every boundary choice when ``h1_inner`` uses cell
differences, which is what :func:`h1_inner` does.
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .grid import SampledFunction, check_same_grid


class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN_LEFT = "robin-left"  # g(a) = 0, g'(b) = 0
    ROBIN_RIGHT = "robin-right"  # g'(a) = 0, g(b) = 0

    @property
    def fixed_left(self) -> bool:
        return self in (BoundaryKind.DIRICHLET, BoundaryKind.ROBIN_LEFT)

    @property
    def fixed_right(self) -> bool:
        return self in (BoundaryKind.DIRICHLET, BoundaryKind.ROBIN_RIGHT)


class CgVariant(enum.Enum):
    NONE = "none"
    L2H1 = "l2h1"
    H1H1 = "h1h1"


def _helmholtz_system(n, h, bc: BoundaryKind):
    inv_h2 = 1.0 / (h * h)
    lower = np.full(n - 1, -inv_h2)
    upper = np.full(n - 1, -inv_h2)
    diag = np.full(n, 2.0 * inv_h2 + 1.0)
    if bc.fixed_left:
        diag[0], upper[0] = 1.0, 0.0
    else:
        # ghost node g[-1] = g[1]
        upper[0] = -2.0 * inv_h2
    if bc.fixed_right:
        diag[-1], lower[-1] = 1.0, 0.0
    else:
        lower[-1] = -2.0 * inv_h2
    return lower, diag, upper


def helmholtz_values(rhs, h, bc: BoundaryKind):
    lower, diag, upper = _helmholtz_system(rhs.shape[0], h, bc)
    b = np.array(rhs, dtype=np.float64)
    if bc.fixed_left:
        b[0] = 0.0
    if bc.fixed_right:
        b[-1] = 0.0
    return _kernels.tridiag_solve(lower, diag, upper, b)


def helmholtz_residual(g: SampledFunction, rhs: SampledFunction, bc: BoundaryKind) -> float:
    """Max-norm residual of the discrete system for a candidate solution."""
    lower, diag, upper = _helmholtz_system(g.grid.n, g.grid.h, bc)
    v = g.values
    res = diag * v
    res[1:] += lower * v[:-1]
    res[:-1] += upper * v[1:]
    b = np.array(rhs.values)
    if bc.fixed_left:
        b[0] = 0.0
    if bc.fixed_right:
        b[-1] = 0.0
    return float(np.max(np.abs(res - b)))


def helmholtz_solve(rhs: SampledFunction, bc: BoundaryKind = BoundaryKind.NEUMANN) -> SampledFunction:
    """Solve ``-g'' + g = rhs`` with the given boundary conditions."""
    return SampledFunction(rhs.grid, helmholtz_values(rhs.values, rhs.grid.h, bc))


def sobolev_gradient(l2grad: SampledFunction, bc: BoundaryKind = BoundaryKind.NEUMANN) -> SampledFunction:
    """Neuberger gradient ``(I - d2/dx2)^-1 l2grad``."""
    return helmholtz_solve(l2grad, bc)


def h1_inner_values(f, g, h, weights) -> float:
    df = np.diff(f)
    dg = np.diff(g)
    return float(np.dot(weights, f * g) + np.dot(df, dg) / h)


def h1_inner(f: SampledFunction, g: SampledFunction) -> float:
    """``<f, g> + <f', g'>`` with ``f'`` taken as cell differences."""
    grid = check_same_grid(f, g)
    return h1_inner_values(f.values, g.values, grid.h, grid.weights)


def pr_coefficient(
    g_new: SampledFunction | None,
    g_old: SampledFunction | None,
    l2_new: SampledFunction | None,
    l2_old: SampledFunction | None,
    variant: CgVariant,
) -> float:
    """Polak-Ribiere coefficient, clamped at zero.

    Returns 0 for ``CgVariant.NONE``, when there is no history yet (any
    ``*_old`` is None) and when the denominator vanishes.
    """
    if variant is CgVariant.NONE or g_old is None or g_new is None:
        return 0.0
    if variant is CgVariant.L2H1:
        if l2_old is None or l2_new is None:
            return 0.0
        grid = check_same_grid(g_new, g_old, l2_new, l2_old)
        w = grid.weights
        num = float(np.dot(w, (g_new.values - g_old.values) * l2_new.values))
        den = float(np.dot(w, g_old.values * l2_old.values))
    else:
        grid = check_same_grid(g_new, g_old)
        num = h1_inner_values(g_new.values - g_old.values, g_new.values, grid.h, grid.weights)
        den = h1_inner_values(g_old.values, g_old.values, grid.h, grid.weights)
    if den == 0.0 or not np.isfinite(den):
        return 0.0
    return max(num / den, 0.0)


def next_direction(h_old: SampledFunction | None, g_new: SampledFunction, gamma: float) -> SampledFunction:
    """``g_new + gamma * h_old``."""
    if h_old is None or gamma == 0.0:
        return g_new
    return g_new + gamma * h_old
