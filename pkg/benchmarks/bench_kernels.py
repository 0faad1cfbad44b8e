"""Time the compiled kernels against their numpy twins.

Run with ``python3 benchmarks/bench_kernels.py``.  The first table times
each kernel in-process (both paths are importable side by side).  The
second times a full experiment in fresh interpreters with and without
``VOLTDIFF_DISABLE_NUMBA``, which is what a user actually switches.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from voltdiff import _kernels


def _tridiag(n):
    h = 1.0 / (n - 1)
    lower = np.full(n - 1, -1.0 / h**2)
    diag = np.full(n, 2.0 / h**2 + 1.0)
    return lower, diag, lower.copy()


def kernel_rows(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        f = rng.normal(size=n)
        h = 1.0 / (n - 1)
        lower, diag, upper = _tridiag(n)
        cases = {
            "cumtrapz": (lambda: _kernels.cumtrapz_numba(f, h), lambda: _kernels.cumtrapz_numpy(f, h)),
            "cumtrapz_adjoint": (
                lambda: _kernels.cumtrapz_adjoint_numba(f, h),
                lambda: _kernels.cumtrapz_adjoint_numpy(f.copy(), h),
            ),
            "tridiag_solve": (
                lambda: _kernels.tridiag_solve_numba(lower, diag, upper, f),
                lambda: _kernels.tridiag_solve_numpy(lower, diag, upper, f),
            ),
        }
        for name, (fast, slow) in cases.items():
            fast()  # compile outside the timing
            number = max(1, 20000 // n)
            t_numba = min(timeit.repeat(fast, number=number, repeat=repeat)) / number
            t_numpy = min(timeit.repeat(slow, number=number, repeat=repeat)) / number
            rows.append((name, n, t_numba, t_numpy))
    return rows


_SCRIPT = """
import time, voltdiff.experiments as e
e.run_example({name!r}, seeds=[0])  # warm up, includes any compilation
t = time.perf_counter()
e.run_example({name!r})
print(time.perf_counter() - t)
"""


def pipeline_seconds(name, disable):
    env = dict(os.environ, VOLTDIFF_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", _SCRIPT.format(name=name)], capture_output=True, text=True, check=True, env=env
    )
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[101, 944, 10_000, 100_000])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--experiments", nargs="*", default=["example1_dense_s001", "example4_kink"])
    args = parser.parse_args(argv)

    if _kernels.numba is None:
        sys.exit("numba is not installed; nothing to compare")

    print(f"{'kernel':<18}{'n':>8}{'numba [us]':>13}{'numpy [us]':>13}{'speedup':>9}")
    for name, n, fast, slow in kernel_rows(args.sizes, args.repeat):
        print(f"{name:<18}{n:>8}{fast * 1e6:>13.2f}{slow * 1e6:>13.2f}{slow / fast:>9.2f}")

    if args.experiments:
        print()
        print(f"{'experiment (11 seeds)':<24}{'numba [s]':>11}{'numpy [s]':>11}{'speedup':>9}")
        for name in args.experiments:
            fast = pipeline_seconds(name, disable=False)
            slow = pipeline_seconds(name, disable=True)
            print(f"{name:<24}{fast:>11.3f}{slow:>11.3f}{slow / fast:>9.2f}")


if __name__ == "__main__":
    main()
