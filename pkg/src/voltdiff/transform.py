"""Twice-integrated working data and the trial-state map ``psi -> u_psi``.

The noisy samples are never differentiated.  They are integrated twice and
corrected by a linear term so that the working function ``u`` vanishes at
both ends and solves ``-u'' = g3`` with ``g3 = 2 g - (g(a) + g(b))``.  The
same closed-form quadrature gives ``u_psi'`` for any trial derivative
``psi``: the unique solution of ``-u_psi'' = T psi`` with zero end values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, volterra
from .errors import ConfigurationError
from .grid import Grid, SampledFunction, check_same_grid

OPERATORS = ("T", "TD")


@dataclass(frozen=True, eq=False)
class TransformedData:
    """Smoothed working data built from one set of noisy samples.

    Attributes
    ----------
    grid : Grid
    u, u_prime : SampledFunction
        Working data and its exact (quadrature) derivative.
    g_tilde : SampledFunction
        The raw samples.
    g_a, g_b : float
        Boundary values used in the transform.
    g3 : SampledFunction
        Right-hand side of the forward equation: ``2 g - (g_a + g_b)`` for
        the symmetric operator, ``g - g_a`` for the left Volterra operator.
    lambda1 : float
        Smallest Dirichlet eigenvalue of ``-d2/dx2``, ``pi**2 / (b - a)**2``.
    operator : str
        ``"T"`` (symmetric, default) or ``"TD"`` (left Volterra operator).
    """

    grid: Grid
    u: SampledFunction
    u_prime: SampledFunction
    g_tilde: SampledFunction
    g_a: float
    g_b: float
    g3: SampledFunction
    lambda1: float
    operator: str = "T"

    @property
    def scale(self) -> float:
        """2 for the symmetric operator, 1 for the left Volterra operator."""
        return 2.0 if self.operator == "T" else 1.0

    @property
    def offset(self) -> float:
        return self.g_a + self.g_b if self.operator == "T" else self.g_a

    def forward(self, values: np.ndarray) -> np.ndarray:
        h = self.grid.h
        if self.operator == "T":
            return volterra.t_op(values, h)
        return volterra.td(values, h)

    def forward_adjoint(self, values: np.ndarray) -> np.ndarray:
        h = self.grid.h
        if self.operator == "T":
            return volterra.t_adjoint(values, h, self.grid.weights)
        return volterra.td_adjoint(values, h)

    def data_fit(self, forward_values: np.ndarray) -> np.ndarray:
        """Map ``T psi`` back to the scale of the samples."""
        return (forward_values + self.offset) / self.scale


def transform_data(
    g_tilde: SampledFunction,
    g_a: float | None = None,
    g_b: float | None = None,
    operator: str = "T",
) -> TransformedData:
    """Integrate noisy samples twice into zero-boundary working data.

    Parameters
    ----------
    g_tilde : SampledFunction
        Noisy samples of ``g``.
    g_a, g_b : float, optional
        Trusted boundary values of ``g``.  Default to the first and last
        samples.
    operator : {"T", "TD"}
        Forward operator the data is prepared for.
    """
    if operator not in OPERATORS:
        raise ConfigurationError(f"unknown operator {operator!r}; expected one of {OPERATORS}")
    grid = g_tilde.grid
    h, length = grid.h, grid.length
    ga = float(g_tilde.values[0]) if g_a is None else float(g_a)
    gb = float(g_tilde.values[-1]) if g_b is None else float(g_b)

    if operator == "T":
        c, s = 2.0, ga + gb
    else:
        c, s = 1.0, ga
    xa = np.asarray(grid.x) - grid.a
    # -u'' = c * g - s = c * d; integrating d keeps constant data exactly zero
    d = g_tilde.values - s / c
    i1 = _kernels.cumtrapz(d, h)
    i2 = _kernels.cumtrapz(i1, h)
    k = c * i2[-1]
    u = c * (i2[-1] - i2) - (length - xa) / length * k
    u[0] = 0.0  # exact in real arithmetic; remove rounding residue
    u[-1] = 0.0
    u_prime = -c * i1 + k / length

    return TransformedData(
        grid=grid,
        u=SampledFunction(grid, u),
        u_prime=SampledFunction(grid, u_prime),
        g_tilde=g_tilde,
        g_a=ga,
        g_b=gb,
        g3=SampledFunction(grid, c * d),
        lambda1=float(np.pi**2 / length**2),
        operator=operator,
    )


def uprime_values(psi_values: np.ndarray, data: TransformedData) -> np.ndarray:
    """Array form of :func:`u_prime_of_psi`."""
    h = data.grid.h
    j1 = _kernels.cumtrapz(data.forward(psi_values), h)
    # J2(b) equals the trapezoid integral of J1
    return -j1 + float(np.dot(data.grid.weights, j1)) / data.grid.length


def u_prime_of_psi(psi: SampledFunction, data: TransformedData) -> SampledFunction:
    """Derivative of the zero-boundary solution of ``-u'' = T psi``."""
    check_same_grid(psi, data.u)
    return SampledFunction(psi.grid, uprime_values(psi.values, data))


def u_of_psi(psi: SampledFunction, data: TransformedData) -> SampledFunction:
    """Zero-boundary solution of ``-u'' = T psi``."""
    check_same_grid(psi, data.u)
    return SampledFunction(psi.grid, _kernels.cumtrapz(uprime_values(psi.values, data), psi.grid.h))
