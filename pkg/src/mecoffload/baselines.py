"""Non-learning strategies and the exhaustive grid oracle."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bandwidth import as_policy
from .capselect import choose_cap
from .config import SystemConfig
from .env import grid_levels
from .exceptions import EnumerationTooLarge
from .model import CostBreakdown, check_gains, evaluate, offload_matrix, single_cap_phi

MAX_CANDIDATES = 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    best_alpha: np.ndarray
    best_phi: float
    evaluations: int


def all_local(config: SystemConfig) -> CostBreakdown:
    """Everything computed on the devices; independent of the channel."""
    alpha = np.zeros((config.n_users, config.n_caps))
    ones = np.ones((config.n_users, config.n_caps))
    w = as_policy("equal").allocate(config.total_bandwidth_hz, config.task_mbits, alpha.sum(1))
    return evaluate(config, alpha, ones, w)


def all_cap(config: SystemConfig, gains, policy="equal", cap_selection="maxmin", rng=None) -> CostBreakdown:
    """Every task fully offloaded to the selected CAP."""
    gains = check_gains(config, gains)
    cap = choose_cap(cap_selection, gains, rng)
    ratios = np.ones(config.n_users)
    w = as_policy(policy).allocate(config.total_bandwidth_hz, config.task_mbits, ratios)
    return evaluate(config, offload_matrix(ratios, cap, config.n_caps), gains, w)


def grid_size(n_users: int, step: float) -> int:
    return (grid_levels(step) + 1) ** n_users


def grid_search(config: SystemConfig, gains, policy="equal", step: float = 0.1, *,
                cap_selection="maxmin", rng=None, share_capacity: bool = True,
                max_candidates: int = MAX_CANDIDATES) -> OracleResult:
    """Exhaustive minimum over ratios ``{0, step, ..., 1}^N`` on the selected CAP.

    Candidates are visited in lexicographic order and only a strict
    improvement replaces the incumbent, so ties resolve to the
    lexicographically smallest ratio vector.
    """
    gains = check_gains(config, gains)
    policy = as_policy(policy)
    k = grid_levels(step)
    n = config.n_users
    size = (k + 1) ** n
    if size > max_candidates:
        raise EnumerationTooLarge(size, max_candidates)
    cap = choose_cap(cap_selection, gains, rng)
    g = gains[:, cap]

    best_phi = np.inf
    best = None
    product = itertools.product(range(k + 1), repeat=n)
    while True:
        chunk = np.fromiter(itertools.chain.from_iterable(itertools.islice(product, _CHUNK)),
                            dtype=float)
        if chunk.size == 0:
            break
        ratios = chunk.reshape(-1, n) / k
        w = policy.allocate(config.total_bandwidth_hz, config.task_mbits, ratios)
        phi = single_cap_phi(config, ratios, g, w, cap, share_capacity=share_capacity)
        i = int(np.argmin(phi))
        if phi[i] < best_phi:
            best_phi, best = float(phi[i]), ratios[i].copy()
    return OracleResult(offload_matrix(best, cap, config.n_caps), best_phi, size)
