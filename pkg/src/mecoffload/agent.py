"""Deep Q-learning for the offloading MDP.

Behaviour follows the usual recipe: epsilon-greedy actions on the online
network, a ring-buffer experience replay sampled uniformly with replacement,
bootstrap targets from a target network that is synchronised every
``sync_interval`` learning steps, and one plain SGD step per environment step
once the buffer holds a full batch.

``literal_argmin=True`` swaps every max over Q-values (greedy choice and the
bootstrap term) for a min.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .bandwidth import as_policy
from .capselect import choose_cap
from .channel import ChannelSampler
from .config import SystemConfig
from .env import OffloadEnv
from .exceptions import DomainError, NumericError
from .model import single_cap_phi
from .nn import Mlp

logger = logging.getLogger(__name__)


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool


class ReplayBuffer:
    """Fixed-capacity transition store; a push into a full buffer overwrites the oldest entry."""

    def __init__(self, capacity: int, state_dim: int):
        if capacity < 1:
            raise DomainError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.states = np.zeros((capacity, state_dim))
        self.next_states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.intp)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity, dtype=bool)
        self.cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, t: Transition) -> None:
        i = self.cursor
        self.states[i] = t.state
        self.actions[i] = t.action
        self.rewards[i] = t.reward
        self.next_states[i] = t.next_state
        self.dones[i] = t.done
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def __getitem__(self, k: int) -> Transition:
        """k-th stored transition, oldest first."""
        if not 0 <= k < self.size:
            raise IndexError(k)
        i = (self.cursor - self.size + k) % self.capacity
        return Transition(self.states[i].copy(), int(self.actions[i]), float(self.rewards[i]),
                          self.next_states[i].copy(), bool(self.dones[i]))

    def sample_indices(self, batch: int, rng: np.random.Generator):
        """Slot indices of a uniform with-replacement minibatch, or None if too few items."""
        if self.size < batch:
            return None
        return rng.integers(self.size, size=batch)

    def sample(self, batch: int, rng: np.random.Generator):
        idx = self.sample_indices(batch, rng)
        if idx is None:
            return None
        return [Transition(self.states[i].copy(), int(self.actions[i]), float(self.rewards[i]),
                           self.next_states[i].copy(), bool(self.dones[i])) for i in idx]


@dataclass(frozen=True)
class AgentConfig:
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 5000
    gamma: float = 0.9
    batch_size: int = 32
    sync_interval: int = 200
    buffer_capacity: int = 10000
    learning_rate: float = 1e-3
    learning_rate_end: float | None = None
    lr_decay_steps: int = 8000
    total_steps: int = 20000
    hidden_sizes: tuple = (64, 64)
    literal_argmin: bool = False
    eval_channels: int = 16

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise DomainError("need 0 <= epsilon_end <= epsilon_start <= 1")
        if not 0.0 <= self.gamma < 1.0:
            raise DomainError("discount must lie in [0, 1)")
        for name in ("epsilon_decay_steps", "batch_size", "sync_interval", "buffer_capacity",
                     "total_steps", "eval_channels"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be > 0")
        if self.learning_rate_end is not None and not 0 < self.learning_rate_end <= self.learning_rate:
            raise DomainError("learning_rate_end must lie in (0, learning_rate]")
        if self.lr_decay_steps < 1:
            raise DomainError("lr_decay_steps must be >= 1")

    def lr(self, step: int) -> float:
        """Step size at ``step``: constant, or linear decay to ``learning_rate_end``."""
        if self.learning_rate_end is None:
            return self.learning_rate
        frac = min(step / self.lr_decay_steps, 1.0)
        return self.learning_rate + frac * (self.learning_rate_end - self.learning_rate)

    def epsilon(self, step: int) -> float:
        """Linear decay from ``epsilon_start`` to ``epsilon_end`` over ``epsilon_decay_steps``."""
        frac = min(step / self.epsilon_decay_steps, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


def _best(q, literal_argmin):
    return int(np.argmin(q)) if literal_argmin else int(np.argmax(q))


def choose_action(net: Mlp, state, epsilon: float, rng: np.random.Generator,
                  literal_argmin: bool = False) -> int:
    """Epsilon-greedy action; greedy ties go to the lowest index."""
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError("epsilon must lie in [0, 1]")
    if rng.random() < epsilon:
        return int(rng.integers(net.n_outputs))
    return _best(net.forward(state), literal_argmin)


def td_target(reward, next_state, done, target_net: Mlp, gamma: float,
              literal_argmin: bool = False) -> float:
    if done:
        return float(reward)
    q = target_net.forward(next_state)
    ext = q.min() if literal_argmin else q.max()
    return float(reward + gamma * ext)


def td_targets(rewards, next_states, dones, target_net: Mlp, gamma: float,
               literal_argmin: bool = False) -> np.ndarray:
    q = target_net.forward(next_states)
    ext = q.min(axis=1) if literal_argmin else q.max(axis=1)
    return rewards + gamma * np.where(dones, 0.0, ext)


@dataclass(frozen=True)
class EnvOptions:
    bandwidth_policy: str = "equal"
    cap_selection: str = "maxmin"
    delta: float = 0.1
    horizon: int = 50
    penalty_multiplier: float = 10.0
    literal_reward: bool = False
    mean_gain: float = 2.0

    def make_env(self, config: SystemConfig) -> OffloadEnv:
        return OffloadEnv(config, self.bandwidth_policy, self.cap_selection, self.delta,
                          self.horizon, self.penalty_multiplier, self.literal_reward)


def greedy_ratios(net: Mlp, env: OffloadEnv, literal_argmin: bool = False) -> np.ndarray:
    """Ratios visited by the greedy policy in ``horizon`` steps from the all-local state.

    Returns a ``(horizon + 1, N)`` array whose first row is all zeros. The
    state carries no channel information, so the path depends on the network
    alone.
    """
    levels = (0,) * env.n_users
    path = [levels]
    for _ in range(env.horizon):
        ratios = np.asarray(levels, dtype=float) / env.n_levels
        levels = env.apply(levels, _best(net.forward(env.features(ratios)), literal_argmin))
        path.append(levels)
    return np.asarray(path, dtype=float) / env.n_levels


def path_costs(config: SystemConfig, policy, ratios, gains, cap: int) -> np.ndarray:
    """Cost of every row of ``ratios`` (P, N) with all offloaders on CAP ``cap``."""
    policy = as_policy(policy)
    w = policy.allocate(config.total_bandwidth_hz, config.task_mbits, ratios)
    return single_cap_phi(config, ratios, np.asarray(gains)[:, cap], w, cap)


def best_on_path(config, policy, ratios, gains, cap):
    """Lowest-cost row of a greedy path under ``gains``; earliest row on ties."""
    costs = path_costs(config, policy, ratios, gains, cap)
    k = int(np.argmin(costs))
    return ratios[k], float(costs[k])


@dataclass
class TrainResult:
    net: Mlp
    target_net: Mlp
    log: dict            # per-iteration arrays: iteration, epsilon, reward, phi, loss
    cost_trace: np.ndarray
    ratios_path: np.ndarray
    eval_gains: np.ndarray
    eval_caps: np.ndarray
    syncs: list = field(default_factory=list)  # learning-step counts at which the target was synced


class TrainingError(RuntimeError):
    def __init__(self, message, dump):
        self.dump = dump
        super().__init__(f"{message}\nstate dump: {json.dumps(dump, default=str)}")


def train(config: SystemConfig, agent_cfg: AgentConfig = AgentConfig(),
          env_opts: EnvOptions = EnvOptions(), seed: int = 0) -> TrainResult:
    """Train a Q-network on freshly drawn channels, one episode per channel draw.

    ``cost_trace[t]`` is the mean cost, over a fixed seeded set of evaluation
    channels, of the greedy policy's decision as of iteration ``t``. The
    greedy decision is re-evaluated at the start and after every episode.
    A greedy decision is the cheapest point on the greedy path from the
    all-local state (see ``greedy_ratios``). ``ratios_path`` is the greedy
    path that scored lowest on the evaluation channels over the whole run.
    """
    ss = np.random.SeedSequence(seed)
    s_init, s_chan, s_explore, s_replay, s_episode, s_eval = ss.spawn(6)
    explore_rng = np.random.default_rng(s_explore)
    replay_rng = np.random.default_rng(s_replay)
    episode_rng = np.random.default_rng(s_episode)
    sampler = ChannelSampler(s_chan, env_opts.mean_gain)

    env = env_opts.make_env(config)
    n, m = config.n_users, config.n_caps
    dims = (n, *agent_cfg.hidden_sizes, env.n_actions)
    net = Mlp(dims, seed=s_init)
    target = net.copy()
    buffer = ReplayBuffer(agent_cfg.buffer_capacity, n)
    lit = agent_cfg.literal_argmin

    eval_sampler = ChannelSampler(s_eval, env_opts.mean_gain)
    eval_rng = np.random.default_rng(s_eval.spawn(1)[0])
    eval_gains = np.stack([eval_sampler.sample_gains(n, m) for _ in range(agent_cfg.eval_channels)])
    eval_caps = np.array([choose_cap(env_opts.cap_selection, g, eval_rng) for g in eval_gains])

    eval_at_cap = eval_gains[np.arange(len(eval_caps)), :, eval_caps][:, None, :]

    def greedy_cost():
        path = greedy_ratios(net, env, lit)
        w = env.policy.allocate(config.total_bandwidth_hz, config.task_mbits, path)
        # (K, P) costs: every evaluation channel against every point on the path
        costs = single_cap_phi(config, path[None], eval_at_cap, w[None], eval_caps[:, None, None])
        return float(np.mean(costs.min(axis=1))), path

    total = agent_cfg.total_steps
    log = {
        "iteration": np.arange(total),
        "epsilon": np.zeros(total),
        "reward": np.zeros(total),
        "phi": np.zeros(total),
        "loss": np.full(total, np.nan),
    }
    trace = np.zeros(total)
    syncs = []
    current, best_path = greedy_cost()
    best = current
    learn_steps = 0
    step = 0
    batch = agent_cfg.batch_size
    while step < total:
        state = env.reset(sampler.sample_gains(n, m), int(episode_rng.integers(2**63)))
        done = False
        while not done and step < total:
            eps = agent_cfg.epsilon(step)
            action = choose_action(net, state.features, eps, explore_rng, lit)
            out = env.step(action)
            done = out.done
            buffer.push(Transition(state.features, action, out.reward, out.next_state.features, done))
            state = out.next_state

            idx = buffer.sample_indices(batch, replay_rng)
            if idx is not None:
                y = td_targets(buffer.rewards[idx], buffer.next_states[idx], buffer.dones[idx],
                               target, agent_cfg.gamma, lit)
                try:
                    loss = net.sgd_step(buffer.states[idx], buffer.actions[idx], y,
                                        agent_cfg.lr(step))
                    if not np.isfinite(loss):
                        raise NumericError("non-finite loss")
                except (NumericError, FloatingPointError) as exc:
                    raise TrainingError(str(exc), {
                        "seed": seed, "iteration": step, "epsilon": eps,
                        "state": state.features.tolist(), "learn_steps": learn_steps,
                        "max_abs_param": float(np.max(np.abs(net.parameters()))),
                    }) from exc
                log["loss"][step] = loss
                learn_steps += 1
                if learn_steps % agent_cfg.sync_interval == 0:
                    net.clone_into(target)
                    syncs.append(learn_steps)

            log["epsilon"][step] = eps
            log["reward"][step] = out.reward
            log["phi"][step] = out.cost
            trace[step] = current
            step += 1
        current, path = greedy_cost()
        if current < best:
            best, best_path = current, path

    return TrainResult(net, target, log, trace, best_path, eval_gains, eval_caps, syncs)


def agent_config_dict(cfg: AgentConfig) -> dict:
    out = asdict(cfg)
    out["hidden_sizes"] = list(cfg.hidden_sizes)
    return out
