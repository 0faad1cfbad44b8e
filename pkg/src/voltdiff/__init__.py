"""Stable derivatives of noisy samples by iterative regularisation.

The samples are integrated twice into smooth working data, and the
derivative is recovered as the minimiser of a convex misfit functional
using Sobolev-gradient descent with early stopping.
"""

from ._kernels import BACKEND
from .descent import (
    DescentConfig,
    DescentReport,
    Discrepancy,
    Heuristic,
    IterationRecord,
    StopReason,
    run_descent,
)
from .errors import ConfigurationError, DegenerateDirectionError, GridMismatchError, NumericalError
from .grid import Grid, SampledFunction, make_uniform_grid, relative_l2_error
from .sobolev import BoundaryKind, CgVariant
from .transform import TransformedData, transform_data

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryKind",
    "CgVariant",
    "ConfigurationError",
    "DegenerateDirectionError",
    "DescentConfig",
    "DescentReport",
    "Discrepancy",
    "Grid",
    "GridMismatchError",
    "Heuristic",
    "IterationRecord",
    "NumericalError",
    "SampledFunction",
    "StopReason",
    "TransformedData",
    "make_uniform_grid",
    "relative_l2_error",
    "run_descent",
    "transform_data",
]
