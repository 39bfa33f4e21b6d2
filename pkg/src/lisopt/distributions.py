"""Seeded sampling policies: isotropic Gaussians and Gaussian/envelope mixtures.

Randomness contract
-------------------
All sampling goes through ``numpy.random.Generator`` seeded with PCG64.
Gaussian variates come from numpy's ziggurat implementation of
``standard_normal``; together with PCG64 this fixes bit-exact sample streams
for a given seed, across runs and platforms.  Per-trial streams are derived
with :func:`derive_stream` (seed XOR a splitmix64 hash of the trial index),
so trials are reproducible independently and in parallel.

Policies are immutable after construction and safe to share between workers;
generators are never shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Array = np.ndarray

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def make_rng(seed: int) -> np.random.Generator:
    """A PCG64 generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def derive_seed(seed: int, index: int) -> int:
    """Seed for sub-stream ``index`` of a base seed: seed XOR splitmix64(index)."""
    return (seed & _MASK64) ^ _splitmix64(index)


def derive_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sub-stream ``index`` of a base seed."""
    return make_rng(derive_seed(seed, index))


@dataclass(frozen=True)
class IsotropicGaussian:
    """N(mean, variance * I_d) with scalar variance.

    Only isotropic Gaussians are supported: every experiment in this package
    uses a scalar variance, and covariance adaptation is explicitly out of
    scope.
    """

    mean: Array
    variance: float

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        object.__setattr__(self, "mean", mean)
        if mean.ndim != 1 or not np.all(np.isfinite(mean)):
            raise ValueError("mean must be a finite 1-d vector")
        if not (self.variance > 0) or not math.isfinite(self.variance):
            raise ValueError("variance must be positive and finite")

    @property
    def dimension(self) -> int:
        return self.mean.size

    def log_density(self, x) -> float:
        x = np.asarray(x, dtype=float)
        d = self.dimension
        sq = float(np.sum((x - self.mean) ** 2))
        return -0.5 * d * math.log(2.0 * math.pi * self.variance) - sq / (2.0 * self.variance)

    def log_density_batch(self, points: Array) -> Array:
        d = self.dimension
        sq = np.sum((points - self.mean) ** 2, axis=1)
        return -0.5 * d * np.log(2.0 * np.pi * self.variance) - sq / (2.0 * self.variance)

    def sample(self, rng: np.random.Generator, count: int) -> Array:
        if count < 1:
            raise ValueError("count must be >= 1")
        z = rng.standard_normal((count, self.dimension))
        return self.mean + math.sqrt(self.variance) * z


@dataclass(frozen=True)
class MixturePolicy:
    """(1 - weight) * adapted + weight * envelope.

    The envelope component is the fixed base policy; keeping its mass at
    ``weight`` > 0 preserves a global lower envelope on the mixture density,
    which keeps importance weights bounded when the adapted mean drifts.
    """

    weight: float
    adapted: IsotropicGaussian
    envelope: IsotropicGaussian

    def __post_init__(self):
        if not (0.0 <= self.weight <= 1.0):
            raise ValueError("mixture weight must lie in [0, 1]")
        if self.adapted.dimension != self.envelope.dimension:
            raise ValueError("component dimensions differ")

    @property
    def dimension(self) -> int:
        return self.adapted.dimension

    def log_density(self, x) -> float:
        return float(self.log_density_batch(np.asarray(x, dtype=float)[None, :])[0])

    def log_density_batch(self, points: Array) -> Array:
        # Degenerate weights return the component bit-exactly.
        if self.weight == 0.0:
            return self.adapted.log_density_batch(points)
        if self.weight == 1.0:
            return self.envelope.log_density_batch(points)
        a = self.adapted.log_density_batch(points) + math.log1p(-self.weight)
        b = self.envelope.log_density_batch(points) + math.log(self.weight)
        m = np.maximum(a, b)
        return m + np.log(np.exp(a - m) + np.exp(b - m))

    def sample(self, rng: np.random.Generator, count: int) -> Array:
        if count < 1:
            raise ValueError("count must be >= 1")
        # Degenerate mixtures skip the component-selection uniforms so that
        # their sample stream coincides with sampling the component directly.
        if self.weight == 0.0:
            return self.adapted.sample(rng, count)
        if self.weight == 1.0:
            return self.envelope.sample(rng, count)
        pick_envelope = rng.random(count) < self.weight
        z = rng.standard_normal((count, self.dimension))
        means = np.where(pick_envelope[:, None], self.envelope.mean, self.adapted.mean)
        stds = np.where(
            pick_envelope,
            math.sqrt(self.envelope.variance),
            math.sqrt(self.adapted.variance),
        )
        return means + stds[:, None] * z
