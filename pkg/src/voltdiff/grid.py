"""Uniform grids, trapezoid quadrature and discrete norms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import ConfigurationError, GridMismatchError


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[a, b]`` into ``n - 1`` cells.

    Parameters
    ----------
    a, b : float
        Interval endpoints, ``a < b``.
    n : int
        Number of nodes, at least 3.
    """

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise ConfigurationError(f"grid needs finite a < b, got a={self.a!r}, b={self.b!r}")
        if int(self.n) != self.n or self.n < 3:
            raise ConfigurationError(f"grid needs at least 3 nodes, got n={self.n!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.b - self.a

    @cached_property
    def x(self) -> np.ndarray:
        nodes = self.a + self.h * np.arange(self.n)
        nodes[-1] = self.b
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def weights(self) -> np.ndarray:
        """Composite trapezoid weights."""
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.flags.writeable = False
        return w


class SampledFunction:
    """Real values attached to the nodes of a :class:`Grid`.

    Supports ``+``, ``-`` with another sampled function on the same grid and
    multiplication by scalars.  The value array is read-only.
    """

    __slots__ = ("grid", "values")
    # numpy scalars defer to our reflected operators instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, grid: Grid, values):
        vals = np.array(values, dtype=np.float64)
        if vals.ndim == 0:
            vals = np.full(grid.n, float(vals))
        if vals.shape != (grid.n,):
            raise ConfigurationError(
                f"expected {grid.n} samples for this grid, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("sampled values must be finite")
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "SampledFunction":
        return cls(grid, func(np.asarray(grid.x)))

    @classmethod
    def zeros(cls, grid: Grid) -> "SampledFunction":
        return cls(grid, np.zeros(grid.n))

    def __repr__(self):
        return f"SampledFunction(grid={self.grid!r}, values=<{self.grid.n} floats>)"

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def _other(self, other):
        if isinstance(other, SampledFunction):
            check_same_grid(self, other)
            return other.values
        return NotImplemented

    def __add__(self, other):
        vals = self._other(other)
        if vals is NotImplemented:
            return NotImplemented
        return SampledFunction(self.grid, self.values + vals)

    def __sub__(self, other):
        vals = self._other(other)
        if vals is NotImplemented:
            return NotImplemented
        return SampledFunction(self.grid, self.values - vals)

    def __mul__(self, scalar):
        if isinstance(scalar, SampledFunction):
            return NotImplemented
        return SampledFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SampledFunction(self.grid, self.values / float(scalar))

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)


def check_same_grid(*funcs: SampledFunction) -> Grid:
    grid = funcs[0].grid
    for f in funcs[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid!r} vs {f.grid!r}")
    return grid


def make_uniform_grid(a: float, b: float, n: int) -> Grid:
    """Build a uniform grid with ``n`` nodes on ``[a, b]``."""
    return Grid(float(a), float(b), int(n) if int(n) == n else n)


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Running trapezoid integral ``x -> int_a^x f``, zero at ``a``."""
    return SampledFunction(f.grid, _kernels.cumtrapz(f.values, f.grid.h))


def integral(f: SampledFunction) -> float:
    return float(np.dot(f.grid.weights, f.values))


def l2_inner(f: SampledFunction, g: SampledFunction) -> float:
    grid = check_same_grid(f, g)
    return float(np.dot(grid.weights, f.values * g.values))


def l2_norm(f: SampledFunction) -> float:
    return float(np.sqrt(max(l2_inner(f, f), 0.0)))


def derivative(f: SampledFunction) -> SampledFunction:
    """Second-order finite difference derivative (one-sided at the ends)."""
    return SampledFunction(f.grid, np.gradient(f.values, f.grid.h, edge_order=2))


def h1_norm(f: SampledFunction) -> float:
    """``sqrt(||f||^2 + ||f'||^2)`` with ``f'`` from :func:`derivative`."""
    return float(np.sqrt(l2_inner(f, f) + l2_inner(derivative(f), derivative(f))))


def relative_l2_error(estimate: SampledFunction, truth: SampledFunction) -> float:
    """``||estimate - truth|| / ||truth||`` in the trapezoid L2 norm."""
    check_same_grid(estimate, truth)
    denom = l2_norm(truth)
    if denom == 0.0:
        raise ConfigurationError("relative error is undefined for a zero reference function")
    return l2_norm(estimate - truth) / denom
