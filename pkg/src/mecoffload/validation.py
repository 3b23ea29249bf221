"""Input checks shared by the estimators."""
from __future__ import annotations

import numpy as np

from .config import SystemConfig
from .exceptions import DomainError


def check_config(config) -> SystemConfig:
    if not isinstance(config, SystemConfig):
        raise TypeError(f"expected a SystemConfig, got {type(config).__name__}")
    return config


def check_gains_batch(gains, config: SystemConfig):
    """Return gains as a (K, N, M) array and whether a single matrix was passed."""
    g = np.asarray(gains, dtype=float)
    single = g.ndim == 2
    if single:
        g = g[None]
    if g.ndim != 3 or g.shape[1:] != (config.n_users, config.n_caps):
        raise DomainError(f"gains must have shape (N, M) or (K, N, M) with "
                          f"N={config.n_users}, M={config.n_caps}; got {np.shape(gains)}")
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise DomainError("channel gains must be finite and >= 0")
    return g, single


def check_caps(cap, k: int, n_caps: int):
    """Broadcast an explicit CAP index (or one per gain matrix) to length ``k``."""
    caps = np.broadcast_to(np.asarray(cap, dtype=int), (k,))
    if np.any(caps < 0) or np.any(caps >= n_caps):
        raise DomainError(f"CAP index out of range for {n_caps} CAPs")
    return caps
