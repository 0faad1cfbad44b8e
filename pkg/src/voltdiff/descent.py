"""Iterative regularisation loop: descent on ``G`` with early stopping."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DegenerateDirectionError
from .grid import Grid, SampledFunction, check_same_grid
from .linesearch import quadratic_step, search
from .objective import gradient_from_residual, weighted_sq_norm
from .sobolev import BoundaryKind, CgVariant, helmholtz_values, pr_coefficient
from .transform import TransformedData, uprime_values

DIRECTIONS = ("l2", "sobolev")


@dataclass(frozen=True)
class Discrepancy:
    """Stop once ``||T psi - g_tilde|| < tau * delta``."""

    delta: float
    tau: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("discrepancy stopping needs delta > 0")
        if not self.tau >= 1:
            raise ConfigurationError("discrepancy stopping needs tau >= 1")


@dataclass(frozen=True)
class Heuristic:
    """Noise-free stopping on the integrated residual ``||u_psi - u||``.

    Stops at the first uptick larger than ``uptick`` (relative), or once the
    residual has changed by less than ``sat_tol`` (relative) over each of the
    last ``patience`` steps, and returns the iterate with the smallest
    integrated residual seen so far.
    """

    uptick: float = 1e-3
    patience: int = 3
    sat_tol: float = 1e-4

    def __post_init__(self):
        if self.uptick < 0 or self.sat_tol < 0 or self.patience < 1:
            raise ConfigurationError("heuristic stopping needs uptick, sat_tol >= 0 and patience >= 1")


StoppingRule = Discrepancy | Heuristic


class StopReason(enum.Enum):
    DISCREPANCY_MET = "DiscrepancyMet"
    HEURISTIC_UPTICK = "HeuristicUptick"
    SATURATION = "Saturation"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class DescentConfig:
    """Settings for :func:`run_descent`.

    Parameters
    ----------
    direction : {"sobolev", "l2"}
        Base gradient.  ``"sobolev"`` smooths the L2 gradient with
        ``(I - d2/dx2)^-1`` under ``bc``.
    cg : CgVariant
        Polak-Ribiere conjugation of Sobolev directions.
    bc : BoundaryKind
    blend : float
        Weight of the Sobolev gradient in ``blend * g_H1 + (1 - blend) * g_L2``.
    stop : Discrepancy, Heuristic or None
        ``None`` runs to ``max_iter``.
    max_iter : int
        Maximum number of iterates, counting the initial guess.
    psi0 : SampledFunction, optional
        Initial guess; zero by default.
    record_history : bool
    """

    direction: str = "sobolev"
    cg: CgVariant = CgVariant.NONE
    bc: BoundaryKind = BoundaryKind.NEUMANN
    blend: float = 1.0
    stop: StoppingRule | None = None
    max_iter: int = 500
    psi0: SampledFunction | None = None
    record_history: bool = True

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigurationError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1")
        if not 0.0 <= self.blend <= 1.0:
            raise ConfigurationError("blend must lie in [0, 1]")
        if self.cg is not CgVariant.NONE and self.direction != "sobolev":
            raise ConfigurationError("conjugate directions need the sobolev base gradient")

    @classmethod
    def with_boundary_values(cls, grid: Grid, phi_a: float, phi_b: float, **kwargs) -> "DescentConfig":
        """Start from the straight line through known end derivatives, Dirichlet gradients."""
        line = phi_a + (phi_b - phi_a) * (np.asarray(grid.x) - grid.a) / grid.length
        kwargs.setdefault("bc", BoundaryKind.DIRICHLET)
        return cls(psi0=SampledFunction(grid, line), **kwargs)


@dataclass(frozen=True)
class IterationRecord:
    m: int
    G_value: float
    residual_g: float
    residual_u: float
    residual_uprime: float
    step_alpha: float
    grad_l2_norm: float
    rel_error: float | None = None


@dataclass
class DescentReport:
    phi_hat: SampledFunction
    smoothed_fit: SampledFunction
    stop_reason: StopReason
    stop_index: int
    history: list = field(default_factory=list)
    data_fit: SampledFunction | None = None

    @property
    def iterations(self) -> int:
        """Number of descent steps taken to reach the selected iterate."""
        return self.stop_index


def discrepancy_stop(residual_g: float, delta: float, tau: float = 1.0) -> bool:
    return residual_g < tau * delta


def heuristic_stop(history, rule: Heuristic) -> int | None:
    """Index to stop at, or None to continue.

    ``history`` is a sequence of records (or bare ``residual_u`` floats).
    """
    res = [getattr(rec, "residual_u", rec) for rec in history]
    if not res:
        raise ConfigurationError("heuristic stopping needs a non-empty history")
    m = len(res) - 1
    best = int(np.argmin(res))
    if m >= 1 and res[m] > res[m - 1] * (1.0 + rule.uptick):
        return best
    if m >= rule.patience:
        flat = True
        for k in range(1, rule.patience + 1):
            ref = res[m - k]
            if ref == 0.0:
                if res[m] != 0.0:
                    flat = False
                    break
            elif abs(res[m] - ref) / ref >= rule.sat_tol:
                flat = False
                break
        if flat:
            return best
    return None


class _Misfit:
    """Least-squares objective ``||A psi - b||^2`` in the trapezoid norm."""

    def __init__(self, data: TransformedData, landweber: bool):
        self.data = data
        self.landweber = landweber
        self.weights = data.grid.weights

    def apply(self, values):
        if self.landweber:
            return self.data.forward(values)
        return uprime_values(values, self.data)

    @property
    def target(self):
        return self.data.g3.values if self.landweber else self.data.u_prime.values

    def gradient(self, misfit):
        # misfit = target - A psi
        if self.landweber:
            return -2.0 * self.data.forward_adjoint(misfit)
        return gradient_from_residual(misfit, self.data)


def _monitors(psi, data: TransformedData, landweber: bool, a_psi):
    grid = data.grid
    w = grid.weights
    if landweber:
        forward = a_psi
        uprime_psi = uprime_values(psi, data)
    else:
        forward = data.forward(psi)
        uprime_psi = a_psi
    r_prime = data.u_prime.values - uprime_psi
    res_g = math.sqrt(weighted_sq_norm(data.data_fit(forward) - data.g_tilde.values, w))
    res_u = math.sqrt(weighted_sq_norm(_kernels.cumtrapz(r_prime, grid.h), w))
    res_up = math.sqrt(weighted_sq_norm(r_prime, w))
    return res_g, res_u, res_up


def run_descent(
    data: TransformedData,
    config: DescentConfig | None = None,
    truth: SampledFunction | None = None,
    landweber: bool = False,
) -> DescentReport:
    """Minimise ``G`` from ``config.psi0`` and stop by the configured rule.

    Parameters
    ----------
    data : TransformedData
    config : DescentConfig, optional
    truth : SampledFunction, optional
        Exact derivative; when given each record carries the relative error.
    landweber : bool
        Minimise ``||T psi - g3||^2`` instead of ``G`` with the same gradient
        and line-search machinery.

    Returns
    -------
    DescentReport
    """
    config = config or DescentConfig()
    grid = data.grid
    w = grid.weights
    h = grid.h
    if config.psi0 is not None:
        check_same_grid(config.psi0, data.u)
        psi = np.array(config.psi0.values)
    else:
        psi = np.zeros(grid.n)
    if truth is not None:
        check_same_grid(truth, data.u)
        truth_norm = math.sqrt(weighted_sq_norm(truth.values, w))

    problem = _Misfit(data, landweber)
    stop = config.stop
    target = problem.target
    a_psi = problem.apply(psi)
    misfit = target - a_psi
    G = weighted_sq_norm(misfit, w)

    history = []
    best_psi, best_res_u = psi.copy(), math.inf
    g_old = l2_old = dir_old = None
    alpha = 0.0
    reason = StopReason.MAX_ITER
    selected = None

    for m in range(config.max_iter):
        grad = problem.gradient(misfit)
        res_g, res_u, res_up = _monitors(psi, data, landweber, a_psi)
        rel = None
        if truth is not None:
            rel = math.sqrt(weighted_sq_norm(psi - truth.values, w)) / truth_norm
        rec = IterationRecord(m, G, res_g, res_u, res_up, alpha, math.sqrt(weighted_sq_norm(grad, w)), rel)
        history.append(rec)
        if res_u < best_res_u:
            best_res_u, best_psi = res_u, psi.copy()

        if isinstance(stop, Discrepancy) and discrepancy_stop(res_g, stop.delta, stop.tau):
            reason = StopReason.DISCREPANCY_MET
            break
        if isinstance(stop, Heuristic):
            idx = heuristic_stop(history, stop)
            if idx is not None:
                uptick = m >= 1 and res_u > history[m - 1].residual_u * (1.0 + stop.uptick)
                reason = StopReason.HEURISTIC_UPTICK if uptick else StopReason.SATURATION
                selected = idx
                break
        if m == config.max_iter - 1:
            break
        if not np.any(grad):
            reason = StopReason.SATURATION
            break

        if config.direction == "l2":
            direction = grad
        else:
            g_new = helmholtz_values(grad, h, config.bc)
            if config.cg is not CgVariant.NONE:
                gamma = pr_coefficient(
                    SampledFunction(grid, g_new),
                    None if g_old is None else SampledFunction(grid, g_old),
                    SampledFunction(grid, grad),
                    None if l2_old is None else SampledFunction(grid, l2_old),
                    config.cg,
                )
                direction = g_new + gamma * dir_old if (dir_old is not None and gamma > 0.0) else g_new
                if np.dot(w, direction * grad) <= 0.0:
                    direction = g_new
                g_old, l2_old = g_new, grad
                dir_old = direction
            else:
                direction = g_new
            if config.blend < 1.0:
                direction = config.blend * direction + (1.0 - config.blend) * grad

        slope = float(np.dot(w, direction * grad))
        a_dir = problem.apply(direction)
        curvature = 2.0 * weighted_sq_norm(a_dir, w)
        if not slope > 0.0:
            reason = StopReason.SATURATION
            break
        try:
            alpha0 = quadratic_step(slope, curvature)
        except DegenerateDirectionError:
            raise DegenerateDirectionError(
                f"iteration {m}: zero curvature along a direction with slope {slope:.3e}"
            ) from None

        def line(alpha, misfit=misfit, a_dir=a_dir):
            return weighted_sq_norm(misfit + alpha * a_dir, w)

        ls = search(line, alpha0, f0=G)
        trial = psi - ls.alpha * direction
        a_trial = problem.apply(trial)
        misfit_trial = target - a_trial
        G_trial = weighted_sq_norm(misfit_trial, w)
        if not G_trial < G:
            # no representable decrease left
            reason = StopReason.SATURATION
            break
        alpha = ls.alpha
        psi, a_psi, misfit, G = trial, a_trial, misfit_trial, G_trial

    if isinstance(stop, Heuristic):
        if selected is None:
            res = [r.residual_u for r in history]
            selected = int(np.argmin(res))
        phi = best_psi
        stop_index = selected
    else:
        phi = psi
        stop_index = len(history) - 1
    phi_hat = SampledFunction(grid, phi)
    forward = data.forward(phi)
    return DescentReport(
        phi_hat=phi_hat,
        smoothed_fit=SampledFunction(grid, forward),
        stop_reason=reason,
        stop_index=stop_index,
        history=history if config.record_history else [],
        data_fit=SampledFunction(grid, data.data_fit(forward)),
    )
