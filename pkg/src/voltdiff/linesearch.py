"""Step length selection along a descent direction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateDirectionError, NumericalError
from .grid import SampledFunction
from .objective import directional_derivative, second_derivative
from .transform import TransformedData

GOLDEN = 0.3819660112501051  # (3 - sqrt(5)) / 2
REL_TOL = 1e-6
ABS_TOL_FACTOR = 1e-10
MAX_EVALS = 100
CURVATURE_TOL = 1e-300


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    f_alpha: float
    evals: int


def quadratic_step(slope: float, curvature: float) -> float:
    """Minimiser of ``f(0) - alpha * slope + alpha**2 / 2 * curvature``."""
    if not curvature > CURVATURE_TOL:
        if slope == 0.0:
            return 0.0
        raise DegenerateDirectionError(
            f"direction has non-positive curvature {curvature!r} with slope {slope!r}"
        )
    return slope / curvature


def initial_step(psi: SampledFunction, h: SampledFunction, data: TransformedData) -> float:
    """Quadratic-model step ``G'(psi)[h] / G''(psi)[h, h]`` for ``psi - alpha h``."""
    return quadratic_step(directional_derivative(psi, h, data), second_derivative(psi, h, h, data))


class _Counted:
    def __init__(self, f):
        self.f = f
        self.evals = 0

    def __call__(self, alpha):
        self.evals += 1
        value = float(self.f(alpha))
        if not math.isfinite(value):
            raise NumericalError(f"objective is not finite at alpha={alpha!r}", alpha=alpha)
        return value


def brent_minimize(f, lo, hi, x=None, fx=None, abs_tol=1e-12, rel_tol=REL_TOL, max_evals=MAX_EVALS):
    """Golden-section search with parabolic steps on ``[lo, hi]``.

    Returns ``(x_min, f_min, evals)``.  ``x``/``fx`` seed the search with a
    known interior point.
    """
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    evals = 0
    if x is None or not a <= x <= b:
        x = a + GOLDEN * (b - a)
        fx = None
    if fx is None:
        fx = f(x)
        evals += 1
    w = v = x
    fw = fv = fx
    d = e = 0.0
    while evals < max_evals:
        mid = 0.5 * (a + b)
        tol1 = rel_tol * abs(x) + abs_tol
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (b - a):
            break
        parabolic = False
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < mid else -tol1
                parabolic = True
        if not parabolic:
            e = (b - x) if x < mid else (a - x)
            d = GOLDEN * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = f(u)
        evals += 1
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx, evals


def _vertex(x0, f0, x1, f1, x2, f2):
    den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0)
    if den == 0.0:
        return None
    num = (x1 - x0) ** 2 * (f1 - f2) - (x1 - x2) ** 2 * (f1 - f0)
    return x1 - 0.5 * num / den


def search(f, alpha0: float, f0: float | None = None) -> LineSearchResult:
    """Bracket and minimise ``f`` along ``alpha >= 0`` starting from ``alpha0``.

    If ``f(alpha0) > f(0)`` the minimum is sought on ``[0, alpha0]``.
    Otherwise ``alpha`` advances in steps of ``alpha0`` while ``f`` keeps
    decreasing, and the last three points bracket the minimum.  When the
    parabola through the bracket already has its vertex at the best point
    (the objective is quadratic along the line) that point is accepted
    without further evaluations.
    """
    fc = _Counted(f)
    if not alpha0 > 0.0 or not math.isfinite(alpha0):
        raise NumericalError(f"initial step must be positive and finite, got {alpha0!r}", alpha=alpha0)
    f_zero = fc(0.0) if f0 is None else float(f0)
    if not math.isfinite(f_zero):
        raise NumericalError("objective is not finite at alpha=0", alpha=0.0)
    abs_tol = ABS_TOL_FACTOR * alpha0

    f1 = fc(alpha0)
    if f1 > f_zero:
        x, fx, _ = brent_minimize(fc, 0.0, alpha0, abs_tol=abs_tol, max_evals=MAX_EVALS - fc.evals)
    else:
        prev_a, prev_f = 0.0, f_zero
        a1, fa1 = alpha0, f1
        a2 = a1 + alpha0
        fa2 = fc(a2)
        while fa2 < fa1 and fc.evals < MAX_EVALS:
            prev_a, prev_f = a1, fa1
            a1, fa1 = a2, fa2
            a2 = a1 + alpha0
            fa2 = fc(a2)
        vertex = _vertex(prev_a, prev_f, a1, fa1, a2, fa2)
        if vertex is not None and abs(vertex - a1) <= REL_TOL * abs(a1) + abs_tol:
            x, fx = a1, fa1
        else:
            x, fx, _ = brent_minimize(
                fc, prev_a, a2, x=a1, fx=fa1, abs_tol=abs_tol, max_evals=max(MAX_EVALS - fc.evals, 1)
            )
    if fx > f_zero:
        return LineSearchResult(0.0, f_zero, fc.evals)
    return LineSearchResult(float(x), float(fx), fc.evals)
