"""Hot inner loops, compiled with numba when available.

Every kernel has a pure numpy/scipy twin.  The compiled path is used unless
numba is missing or ``VOLTDIFF_DISABLE_NUMBA`` is set to a truthy value
(``1``, ``true``, ``yes``) before the package is imported.  Both paths return
identical results up to floating point summation order.
"""

import os

import numpy as np
from scipy.linalg import solve_banded

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("VOLTDIFF_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)
USE_NUMBA = numba is not None and not _DISABLED


# ---------------------------------------------------------------------------
# numpy reference implementations


def cumtrapz_numpy(f, h):
    out = np.empty_like(f, dtype=np.float64)
    out[0] = 0.0
    np.cumsum(0.5 * h * (f[1:] + f[:-1]), out=out[1:])
    return out


def cumtrapz_adjoint_numpy(v, h):
    # transpose of cumtrapz under the trapezoid-weighted inner product:
    # out_i = sum_{j>i} w_j v_j + [i>0] h/2 v_i
    wv = h * v
    wv[-1] *= 0.5
    tail = np.zeros_like(wv)
    tail[:-1] = np.cumsum(wv[::-1])[::-1][1:]
    out = tail + 0.5 * h * v
    out[0] = tail[0]
    return out


def tridiag_solve_numpy(lower, diag, upper, rhs):
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs)


# ---------------------------------------------------------------------------
# compiled implementations


def _cumtrapz_loop(f, h):
    n = f.shape[0]
    out = np.empty(n)
    out[0] = 0.0
    acc = 0.0
    for i in range(1, n):
        acc += 0.5 * h * (f[i - 1] + f[i])
        out[i] = acc
    return out


def _cumtrapz_adjoint_loop(v, h):
    n = v.shape[0]
    out = np.empty(n)
    acc = 0.0
    # acc holds sum_{j>i} w_j v_j while walking right to left
    for i in range(n - 1, -1, -1):
        if i > 0:
            out[i] = acc + 0.5 * h * v[i]
        else:
            out[i] = acc
        w = 0.5 * h if (i == 0 or i == n - 1) else h
        acc += w * v[i]
    return out


def _thomas_loop(lower, diag, upper, rhs):
    n = diag.shape[0]
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0] if n > 1 else 0.0
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i - 1] * c[i - 1]
        if i < n - 1:
            c[i] = upper[i] / denom
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom
    x = np.empty(n)
    x[n - 1] = d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


if numba is not None:
    cumtrapz_numba = numba.njit(cache=True)(_cumtrapz_loop)
    cumtrapz_adjoint_numba = numba.njit(cache=True)(_cumtrapz_adjoint_loop)
    tridiag_solve_numba = numba.njit(cache=True)(_thomas_loop)
else:  # pragma: no cover
    cumtrapz_numba = cumtrapz_adjoint_numba = tridiag_solve_numba = None


if USE_NUMBA:

    def cumtrapz(f, h):
        return cumtrapz_numba(np.ascontiguousarray(f, dtype=np.float64), float(h))

    def cumtrapz_adjoint(v, h):
        return cumtrapz_adjoint_numba(np.ascontiguousarray(v, dtype=np.float64), float(h))

    def tridiag_solve(lower, diag, upper, rhs):
        return tridiag_solve_numba(
            np.ascontiguousarray(lower, dtype=np.float64),
            np.ascontiguousarray(diag, dtype=np.float64),
            np.ascontiguousarray(upper, dtype=np.float64),
            np.ascontiguousarray(rhs, dtype=np.float64),
        )

else:

    def cumtrapz(f, h):
        return cumtrapz_numpy(np.asarray(f, dtype=np.float64), float(h))

    def cumtrapz_adjoint(v, h):
        return cumtrapz_adjoint_numpy(np.array(v, dtype=np.float64), float(h))

    def tridiag_solve(lower, diag, upper, rhs):
        return tridiag_solve_numpy(lower, diag, upper, rhs)


BACKEND = "numba" if USE_NUMBA else "numpy"
