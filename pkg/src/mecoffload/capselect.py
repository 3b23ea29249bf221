"""Serving-CAP choice: max-min channel gain rule and a uniform random baseline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class CapChoice:
    index: int
    theta: float


def select_cap(gains) -> CapChoice:
    """CAP whose weakest user link is strongest; ties go to the lowest index."""
    g = np.asarray(gains, dtype=float)
    if g.ndim != 2 or g.size == 0:
        raise DomainError("gains must be a non-empty N x M matrix")
    theta = g.min(axis=0)
    best = int(np.argmax(theta))  # argmax returns the first maximum
    return CapChoice(best, float(theta[best]))


def random_cap(rng: np.random.Generator, m: int) -> int:
    if m < 1:
        raise DomainError("need at least one CAP")
    return int(rng.integers(m))


def choose_cap(rule, gains, rng=None) -> int:
    """Apply a selection rule: ``"maxmin"``, ``"random"`` or a fixed CAP index."""
    m = np.shape(gains)[1]
    if rule == "maxmin":
        return select_cap(gains).index
    if rule == "random":
        if rng is None:
            raise DomainError("random CAP selection needs a generator")
        return random_cap(rng, m)
    try:
        idx = int(rule)
    except (TypeError, ValueError):
        raise DomainError(f"unknown CAP selection rule {rule!r}") from None
    if not 0 <= idx < m:
        raise DomainError(f"CAP index {idx} out of range for {m} CAPs")
    return idx
