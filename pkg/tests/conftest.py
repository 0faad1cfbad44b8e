import numpy as np
import pytest

from voltdiff.grid import SampledFunction, make_uniform_grid

# acceptance lines collected by tests/test_acceptance.py, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def unit_grid():
    return make_uniform_grid(0.0, 1.0, 101)


@pytest.fixture
def fine_grid():
    # h = 1e-3, where O(h**2) quadrature errors sit below 1e-6
    return make_uniform_grid(0.0, 1.0, 1001)


@pytest.fixture
def sine_grid():
    # the [0, 3 pi] interval at h close to 0.01
    return make_uniform_grid(0.0, 3.0 * np.pi, 944)


def sampled(grid, func):
    return SampledFunction.from_callable(grid, func)


def sup(a, b=0.0):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
