import os
import subprocess
import sys

import numpy as np
import pytest

from voltdiff import _kernels

needs_numba = pytest.mark.skipif(_kernels.numba is None, reason="numba not installed")


def dense_cumtrapz(n, h):
    C = np.zeros((n, n))
    for i in range(1, n):
        C[i, :i + 1] = h
        C[i, 0] = C[i, i] = h / 2
    return C


@pytest.mark.parametrize("n", [2, 3, 10, 257])
def test_cumtrapz_matches_dense(n, rng):
    f = rng.normal(size=n)
    h = 0.37
    expected = dense_cumtrapz(n, h) @ f
    np.testing.assert_allclose(_kernels.cumtrapz_numpy(f, h), expected, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(_kernels.cumtrapz(f, h), expected, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 10, 257])
def test_adjoint_is_weighted_transpose(n, rng):
    h = 0.1
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    C = dense_cumtrapz(n, h)
    # W^-1 C^T W
    expected = (C.T @ (w * np.eye(n))) / w[:, None]
    v = rng.normal(size=n)
    np.testing.assert_allclose(_kernels.cumtrapz_adjoint_numpy(v.copy(), h), expected @ v, rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(_kernels.cumtrapz_adjoint(v, h), expected @ v, rtol=1e-11, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 50, 1000])
def test_tridiag_matches_dense(n, rng):
    lower, upper = rng.normal(size=n - 1), rng.normal(size=n - 1)
    diag = 4.0 + np.abs(rng.normal(size=n))
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    expected = np.linalg.solve(A, rhs)
    np.testing.assert_allclose(_kernels.tridiag_solve_numpy(lower, diag, upper, rhs), expected, rtol=1e-10)
    np.testing.assert_allclose(_kernels.tridiag_solve(lower, diag, upper, rhs), expected, rtol=1e-10)


@needs_numba
@pytest.mark.parametrize("n", [2, 5, 944, 5000])
def test_backends_agree(n, rng):
    f = rng.normal(size=n)
    h = 3 * np.pi / (n - 1)
    np.testing.assert_allclose(_kernels.cumtrapz_numba(f, h), _kernels.cumtrapz_numpy(f, h), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(
        _kernels.cumtrapz_adjoint_numba(f, h), _kernels.cumtrapz_adjoint_numpy(f.copy(), h), rtol=1e-12, atol=1e-12
    )
    lower = np.full(n - 1, -1.0 / h**2)
    upper = lower.copy()
    diag = np.full(n, 2.0 / h**2 + 1.0)
    a = _kernels.tridiag_solve_numba(lower, diag, upper, f)
    b = _kernels.tridiag_solve_numpy(lower, diag, upper, f)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12 * np.max(np.abs(b)))


def test_inputs_not_modified(rng):
    f = rng.normal(size=20)
    keep = f.copy()
    _kernels.cumtrapz(f, 0.1)
    _kernels.cumtrapz_adjoint(f, 0.1)
    assert np.array_equal(f, keep)


def _backend_with_env(value):
    env = dict(os.environ)
    env.pop("VOLTDIFF_DISABLE_NUMBA", None)
    if value is not None:
        env["VOLTDIFF_DISABLE_NUMBA"] = value
    out = subprocess.run(
        [sys.executable, "-c", "import voltdiff; print(voltdiff.BACKEND)"],
        capture_output=True, text=True, check=True, env=env,
    )
    return out.stdout.strip()


@pytest.mark.parametrize("value", ["1", "true", "YES"])
def test_env_flag_selects_numpy(value):
    assert _backend_with_env(value) == "numpy"


@needs_numba
@pytest.mark.parametrize("value", [None, "0", ""])
def test_default_backend_is_numba(value):
    assert _backend_with_env(value) == "numba"


def test_pipeline_agrees_across_backends():
    # the same experiment under both backends, compared numerically
    script = (
        "import voltdiff.experiments as e;"
        "r = e.run_example('example1_dense_s01', seeds=[0, 1]);"
        "print(' '.join(repr(float(x)) for x in r.errors))"
    )
    results = []
    for flag in ("0", "1"):
        env = dict(os.environ, VOLTDIFF_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, check=True, env=env)
        results.append(np.array([float(v) for v in out.stdout.split()]))
    np.testing.assert_allclose(results[0], results[1], rtol=1e-6)
