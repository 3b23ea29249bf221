"""Offloading as a Markov decision process.

State: each user's offloaded volume ``l_n * A_n`` scaled by the largest task
size. Actions: ``2N`` discrete moves, raising or lowering one user's ratio by
``delta`` with clamping to [0, 1]. Action ``a`` moves user ``a // 2`` up when
``a`` is even and down when odd.

Reward is +1 when the weighted cost strictly drops and -1 otherwise
(``literal_reward=True`` rewards strict increases instead). An episode starts
with every task computed locally, keeps its channel and serving CAP fixed and
ends after ``horizon`` steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandwidth import BandwidthPolicy, as_policy
from .capselect import choose_cap
from .config import SystemConfig
from .exceptions import DomainError
from .model import check_gains, offload_matrix, single_cap_phi


@dataclass(frozen=True)
class EnvState:
    levels: tuple  # A_n = levels[n] / n_levels
    features: np.ndarray
    alpha: np.ndarray
    cost: float
    step_index: int

    @property
    def ratios(self) -> np.ndarray:
        return self.alpha.sum(axis=1)


@dataclass(frozen=True)
class StepOutcome:
    next_state: EnvState
    reward: float
    cost: float
    done: bool


def encode_action(user: int, direction: int) -> int:
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    return 2 * user + (0 if direction == 1 else 1)


def decode_action(action: int) -> tuple[int, int]:
    return action // 2, (1 if action % 2 == 0 else -1)


def grid_levels(delta: float) -> int:
    """Number of ratio steps between 0 and 1; ``1 / delta`` must be an integer."""
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    k = round(1.0 / delta)
    if abs(k * delta - 1.0) > 1e-9:
        raise DomainError(f"1/delta must be an integer, got delta={delta!r}")
    return k


class OffloadEnv:
    def __init__(self, config: SystemConfig, policy="equal", cap_selection="maxmin",
                 delta: float = 0.1, horizon: int = 50, penalty_multiplier: float = 10.0,
                 literal_reward: bool = False):
        if horizon < 1:
            raise DomainError("horizon must be >= 1")
        if not penalty_multiplier > 0:
            raise DomainError("penalty_multiplier must be > 0")
        self.config = config
        self.policy = as_policy(policy)
        self.cap_selection = cap_selection
        self.delta = delta
        self.n_levels = grid_levels(delta)
        self.horizon = int(horizon)
        self.penalty_multiplier = float(penalty_multiplier)
        self.literal_reward = bool(literal_reward)
        self.n_users = config.n_users
        self.n_actions = 2 * config.n_users
        self._scale = max(config.task_mbits) or 1.0
        zeros = np.zeros(config.n_users)
        # all-local cost does not depend on the channel
        self.local_cost = float(single_cap_phi(config, zeros, np.ones(config.n_users),
                                               config.total_bandwidth_hz / config.n_users, 0))
        self.penalty = self.penalty_multiplier * self.local_cost
        self.state = None
        self.gains = None
        self.cap = None

    # -- episode --------------------------------------------------------
    def reset(self, gains, episode_seed=None) -> EnvState:
        self.gains = check_gains(self.config, gains)
        rng = np.random.default_rng(episode_seed)
        self.cap = choose_cap(self.cap_selection, self.gains, rng)
        self._gain_at_cap = self.gains[:, self.cap]
        self._cache = {}
        self.state = self.make_state((0,) * self.n_users, 0)
        return self.state

    def step(self, action: int) -> StepOutcome:
        if self.state is None:
            raise RuntimeError("call reset() before step()")
        out = self.transition(self.state, action)
        self.state = out.next_state
        return out

    def transition(self, state: EnvState, action: int) -> StepOutcome:
        """Outcome of ``action`` from ``state`` under the current episode's channel."""
        if not 0 <= action < self.n_actions:
            raise DomainError(f"action {action} outside [0, {self.n_actions})")
        nxt = self.make_state(self.apply(state.levels, action), state.step_index + 1)
        if self.literal_reward:
            better = nxt.cost > state.cost
        else:
            better = nxt.cost < state.cost
        return StepOutcome(nxt, 1.0 if better else -1.0, nxt.cost, nxt.step_index >= self.horizon)

    # -- helpers --------------------------------------------------------
    def make_state(self, levels: tuple, step_index: int) -> EnvState:
        ratios = np.asarray(levels, dtype=float) / self.n_levels
        return EnvState(levels, self.features(ratios),
                        offload_matrix(ratios, self.cap, self.config.n_caps),
                        self.cost_of(levels, ratios), step_index)

    def features(self, ratios) -> np.ndarray:
        return np.asarray(self.config.task_mbits) * ratios / self._scale

    def bandwidth(self, ratios) -> np.ndarray:
        cfg = self.config
        return self.policy.allocate(cfg.total_bandwidth_hz, cfg.task_mbits, ratios)

    def cost_of(self, levels: tuple, ratios) -> float:
        cost = self._cache.get(levels)
        if cost is None:
            phi = float(single_cap_phi(self.config, ratios, self._gain_at_cap,
                                       self.bandwidth(ratios), self.cap))
            # a positive offload over a zero-rate link costs the penalty
            cost = phi if np.isfinite(phi) else self.penalty
            self._cache[levels] = cost
        return cost

    def apply(self, levels: tuple, action: int) -> tuple:
        """Ratio levels after ``action``, without touching costs or the channel."""
        user, direction = decode_action(action)
        levels = list(levels)
        levels[user] = min(max(levels[user] + direction, 0), self.n_levels)
        return tuple(levels)
