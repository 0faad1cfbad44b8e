"""The misfit functional ``G(psi) = ||u' - u_psi'||^2`` and its derivatives.

``G`` is an exact quadratic in ``psi``: ``psi -> u_psi'`` is linear.  The
gradient returned by :func:`l2_gradient` is the Riesz representer of the
discrete first variation in the trapezoid inner product.  It agrees with the
continuum formula ``T*(-2 (u - u_psi))`` up to ``O(h**2)`` end-node terms and
matches finite differences of :func:`evaluate_G` to rounding.
"""

import numpy as np

from . import _kernels
from .grid import SampledFunction, check_same_grid
from .transform import TransformedData, uprime_values


def weighted_sq_norm(values, weights):
    return float(np.dot(weights, values * values))


def residual_values(psi_values, data: TransformedData):
    """``u' - u_psi'`` as an array."""
    return data.u_prime.values - uprime_values(psi_values, data)


def gradient_from_residual(r, data: TransformedData):
    """Gradient of ``||r||^2`` with respect to ``psi`` where ``r = u' - L psi``."""
    grid = data.grid
    # L = -P C K with P removing the weighted mean; each factor is replaced
    # by its exact transpose under the trapezoid weights
    centred = r - float(np.dot(grid.weights, r)) / grid.length
    return 2.0 * data.forward_adjoint(_kernels.cumtrapz_adjoint(centred, grid.h))


def evaluate_G(psi: SampledFunction, data: TransformedData) -> float:
    """Squared L2 distance between ``u'`` and ``u_psi'``."""
    check_same_grid(psi, data.u)
    return weighted_sq_norm(residual_values(psi.values, data), data.grid.weights)


def l2_gradient(psi: SampledFunction, data: TransformedData) -> SampledFunction:
    """L2 (trapezoid) gradient of ``G`` at ``psi``."""
    check_same_grid(psi, data.u)
    return SampledFunction(psi.grid, gradient_from_residual(residual_values(psi.values, data), data))


def directional_derivative(psi: SampledFunction, h: SampledFunction, data: TransformedData) -> float:
    """``G'(psi)[h]``, equal to ``<h, l2_gradient(psi)>``."""
    check_same_grid(psi, h, data.u)
    r = residual_values(psi.values, data)
    lh = uprime_values(h.values, data)
    return -2.0 * float(np.dot(data.grid.weights, lh * r))


def second_derivative(
    psi: SampledFunction, h: SampledFunction, k: SampledFunction, data: TransformedData
) -> float:
    """``G''(psi)[h, k] = 2 <w_h', w_k'>`` where ``-w'' = T h`` with zero ends.

    Does not depend on ``psi``.
    """
    check_same_grid(psi, h, k, data.u)
    lh = uprime_values(h.values, data)
    lk = lh if k is h else uprime_values(k.values, data)
    return 2.0 * float(np.dot(data.grid.weights, lh * lk))
