"""Bandwidth split rules.

* ``equal``  -- every user gets ``W_total / N``.
* ``length`` -- shares proportional to task size.
* ``ratio``  -- shares proportional to the current offloading ratios; when no
  user offloads it falls back to ``equal``.

Every rule returns non-negative shares summing to ``W_total``.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .exceptions import DomainError


class BandwidthPolicy(str, Enum):
    EQUAL = "equal"
    LENGTH = "length"
    RATIO = "ratio"

    def allocate(self, w_total, task_mbits, ratios):
        if self is BandwidthPolicy.EQUAL:
            return allocate_equal(w_total, len(task_mbits))
        if self is BandwidthPolicy.LENGTH:
            return allocate_by_length(w_total, task_mbits)
        return allocate_by_ratio(w_total, ratios)

    @property
    def label(self):
        """Strategy name of a DQN trained under this rule (E-DQN, L-DQN, R-DQN)."""
        return {"equal": "E-DQN", "length": "L-DQN", "ratio": "R-DQN"}[self.value]


def as_policy(policy) -> BandwidthPolicy:
    try:
        return BandwidthPolicy(policy)
    except ValueError:
        raise DomainError(f"unknown bandwidth policy {policy!r}; "
                          f"expected one of {[p.value for p in BandwidthPolicy]}") from None


def allocate_equal(w_total: float, n: int) -> np.ndarray:
    if n < 1 or not w_total > 0:
        raise DomainError("need n >= 1 and w_total > 0")
    return np.full(n, w_total / n)


def allocate_by_length(w_total: float, task_mbits) -> np.ndarray:
    l = np.asarray(task_mbits, dtype=float)
    if np.any(l < 0):
        raise DomainError("task sizes must be >= 0")
    total = l.sum()
    if not total > 0:
        raise DomainError("length-proportional split needs a positive total task size")
    return l / total * w_total


def allocate_by_ratio(w_total: float, ratios) -> np.ndarray:
    a = np.asarray(ratios, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise DomainError("offloading ratios must lie in [0, 1]")
    total = a.sum(axis=-1, keepdims=True)
    equal = np.full(a.shape, w_total / a.shape[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        prop = a / total * w_total
    return np.where(total > 0, prop, equal)
