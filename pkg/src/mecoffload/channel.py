"""Seeded Rayleigh flat-fading channel gains.

A complex gain ``h ~ CN(0, mean_gain)`` has power ``|h|^2`` exponentially
distributed with mean ``mean_gain``; that power is what the samplers return.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError


class ChannelSampler:
    """Stream of independent N x M gain matrices.

    Draws come from a PCG64 generator seeded through ``numpy.random.SeedSequence``;
    ``spawn`` yields statistically independent child samplers for replicas.
    """

    def __init__(self, seed=0, mean_gain: float = 2.0):
        if not mean_gain > 0:
            raise DomainError("mean_gain must be > 0")
        self.mean_gain = float(mean_gain)
        self._seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._rng = np.random.Generator(np.random.PCG64(self._seq))

    def sample_gains(self, n: int, m: int) -> np.ndarray:
        if n < 1 or m < 1:
            raise DomainError("gain matrix needs n, m >= 1")
        # complex Gaussian with variance mean_gain: |h|^2 = (x^2 + y^2) with x, y ~ N(0, mean_gain/2)
        re, im = self._rng.normal(0.0, np.sqrt(self.mean_gain / 2.0), size=(2, n, m))
        return re * re + im * im

    def spawn(self, k: int) -> list["ChannelSampler"]:
        return [ChannelSampler(s, self.mean_gain) for s in self._seq.spawn(k)]


def sample_gains(sampler: ChannelSampler, n: int, m: int) -> np.ndarray:
    return sampler.sample_gains(n, m)
