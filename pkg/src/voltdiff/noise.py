"""Seeded synthetic noise.

Draws come from numpy's ``Generator`` on the ``PCG64`` bit generator, seeded
directly with the integer seed.  ``RNG_NAME`` records the algorithm so runs
can be matched across machines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import Grid, SampledFunction

RNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"


@dataclass(frozen=True)
class Gaussian:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("Gaussian noise needs sigma > 0")

    def draw(self, rng, n):
        return rng.normal(0.0, self.sigma, n)


@dataclass(frozen=True)
class Uniform:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("uniform noise needs delta > 0")

    def draw(self, rng, n):
        return rng.uniform(-self.delta, self.delta, n)


def _mix(rng, n, mix_prob, first, second):
    pick_first = rng.random(n) < mix_prob
    a = first(n)
    b = second(n)
    return np.where(pick_first, a, b)


@dataclass(frozen=True)
class MixtureUniformNormal:
    """Per node: uniform(-delta, delta) with probability ``mix_prob``, else normal(0, delta)."""

    delta: float
    mix_prob: float = 0.5

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("mixture noise needs delta > 0")
        if not 0.0 <= self.mix_prob <= 1.0:
            raise ConfigurationError("mix_prob must lie in [0, 1]")

    def draw(self, rng, n):
        d = self.delta
        return _mix(rng, n, self.mix_prob, lambda m: rng.uniform(-d, d, m), lambda m: rng.normal(0.0, d, m))


@dataclass(frozen=True)
class NonzeroMeanMixture:
    """Per node: uniform(-0.8 delta, 1.2 delta) with probability ``mix_prob``, else normal(0.1, delta)."""

    delta: float
    mix_prob: float = 0.5

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("mixture noise needs delta > 0")
        if not 0.0 <= self.mix_prob <= 1.0:
            raise ConfigurationError("mix_prob must lie in [0, 1]")

    def draw(self, rng, n):
        d = self.delta
        return _mix(
            rng,
            n,
            self.mix_prob,
            lambda m: rng.uniform(-0.8 * d, 1.2 * d, m),
            lambda m: rng.normal(0.1, d, m),
        )


NoiseModel = Gaussian | Uniform | MixtureUniformNormal | NonzeroMeanMixture


def sample_noise(model: NoiseModel, grid: Grid, seed: int, pin_endpoints: bool = False) -> SampledFunction:
    """One noise realisation per grid node, reproducible from ``seed``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    eps = np.asarray(model.draw(rng, grid.n), dtype=np.float64)
    if pin_endpoints:
        eps[0] = eps[-1] = 0.0
    return SampledFunction(grid, eps)
