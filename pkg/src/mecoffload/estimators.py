"""Offloading strategies with a scikit-learn estimator surface.

Every strategy is fitted on a ``SystemConfig`` and predicts an N x M offload
matrix for a channel realisation (or a stack of them)::

    est = DQNOffloader(bandwidth_policy="ratio", random_state=3).fit(config)
    alpha = est.predict(gains)            # (N, M)
    phi = est.cost(gains).phi

Hyper-parameters are constructor arguments, so ``get_params``/``set_params``
and ``sklearn.base.clone`` work as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .agent import AgentConfig, EnvOptions, best_on_path, train
from .bandwidth import as_policy
from .baselines import MAX_CANDIDATES, grid_search
from .capselect import choose_cap
from .model import evaluate, offload_matrix
from .validation import check_caps, check_config, check_gains_batch


class OffloadStrategy(BaseEstimator):
    """Base class: subclasses implement ``_ratios(gains, cap)``."""

    bandwidth_policy = "equal"
    cap_selection = "maxmin"
    random_state = None

    def fit(self, X, y=None):
        self.config_ = check_config(X)
        as_policy(self.bandwidth_policy)
        self.rng_ = np.random.default_rng(self.random_state)
        self._fit(self.config_)
        return self

    def _fit(self, config):
        pass

    def _select(self, gains):
        return choose_cap(self.cap_selection, gains, self.rng_)

    def predict(self, gains, cap=None):
        """Offload matrix per channel realisation.

        ``cap`` overrides the strategy's CAP selection rule with an explicit
        index (scalar or one per realisation).
        """
        check_is_fitted(self, "config_")
        g, single = check_gains_batch(gains, self.config_)
        caps = [self._select(x) for x in g] if cap is None else check_caps(cap, len(g), self.config_.n_caps)
        out = np.stack([offload_matrix(self._ratios(x, int(c)), int(c), self.config_.n_caps)
                        for x, c in zip(g, caps)])
        return out[0] if single else out

    def bandwidth(self, alpha):
        cfg = self.config_
        return as_policy(self.bandwidth_policy).allocate(
            cfg.total_bandwidth_hz, cfg.task_mbits, np.asarray(alpha).sum(axis=-1))

    def cost(self, gains, cap=None):
        """CostBreakdown of the predicted decision (a list for stacked gains)."""
        g, single = check_gains_batch(gains, self.config_)
        alphas = self.predict(g, cap)
        out = [evaluate(self.config_, a, x, self.bandwidth(a)) for a, x in zip(alphas, g)]
        return out[0] if single else out

    def score(self, gains, y=None, cap=None):
        """Negative mean weighted cost, so that higher is better."""
        costs = self.cost(gains, cap)
        costs = [costs] if not isinstance(costs, list) else costs
        return -float(np.mean([c.phi for c in costs]))


class AllLocal(OffloadStrategy):
    def __init__(self):
        pass

    def _ratios(self, gains, cap):
        return np.zeros(self.config_.n_users)


class AllCap(OffloadStrategy):
    def __init__(self, bandwidth_policy="equal", cap_selection="maxmin", random_state=None):
        self.bandwidth_policy = bandwidth_policy
        self.cap_selection = cap_selection
        self.random_state = random_state

    def _ratios(self, gains, cap):
        return np.ones(self.config_.n_users)


class GridSearchOracle(OffloadStrategy):
    """Exhaustive search over the ratio grid for each channel realisation."""

    def __init__(self, bandwidth_policy="equal", cap_selection="maxmin", step=0.1,
                 share_capacity=True, max_candidates=MAX_CANDIDATES, random_state=None):
        self.bandwidth_policy = bandwidth_policy
        self.cap_selection = cap_selection
        self.step = step
        self.share_capacity = share_capacity
        self.max_candidates = max_candidates
        self.random_state = random_state

    def search(self, gains, cap):
        return grid_search(self.config_, gains, self.bandwidth_policy, self.step,
                           cap_selection=cap, share_capacity=self.share_capacity,
                           max_candidates=self.max_candidates)

    def _ratios(self, gains, cap):
        return self.search(gains, cap).best_alpha.sum(axis=1)


class DQNOffloader(OffloadStrategy):
    """Deep Q-network offloading policy.

    ``fit`` trains on freshly drawn Rayleigh channels. ``predict`` rolls the
    greedy policy out from the all-local state and returns the cheapest
    decision on that path under the given channel.

    Fitted attributes: ``net_`` (online Q-network), ``path_`` (greedy ratio
    path), ``cost_trace_`` and ``log_`` (per-iteration training records),
    ``result_`` (the full ``TrainResult``).
    """

    def __init__(self, bandwidth_policy="equal", cap_selection="maxmin", delta=0.1,
                 horizon=100, penalty_multiplier=10.0, literal_reward=False,
                 literal_argmin=False, hidden_sizes=(64, 64), learning_rate=3e-2,
                 learning_rate_end=1e-3, lr_decay_steps=8000, gamma=0.3,
                 epsilon_start=1.0, epsilon_end=0.05, epsilon_decay_steps=5000,
                 batch_size=32, buffer_capacity=10000, sync_interval=200,
                 total_steps=20000, eval_channels=64, mean_gain=2.0, random_state=0):
        self.bandwidth_policy = bandwidth_policy
        self.cap_selection = cap_selection
        self.delta = delta
        self.horizon = horizon
        self.penalty_multiplier = penalty_multiplier
        self.literal_reward = literal_reward
        self.literal_argmin = literal_argmin
        self.hidden_sizes = hidden_sizes
        self.learning_rate = learning_rate
        self.learning_rate_end = learning_rate_end
        self.lr_decay_steps = lr_decay_steps
        self.gamma = gamma
        self.epsilon_start = epsilon_start
        self.epsilon_end = epsilon_end
        self.epsilon_decay_steps = epsilon_decay_steps
        self.batch_size = batch_size
        self.buffer_capacity = buffer_capacity
        self.sync_interval = sync_interval
        self.total_steps = total_steps
        self.eval_channels = eval_channels
        self.mean_gain = mean_gain
        self.random_state = random_state

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            epsilon_start=self.epsilon_start, epsilon_end=self.epsilon_end,
            epsilon_decay_steps=self.epsilon_decay_steps, gamma=self.gamma,
            batch_size=self.batch_size, sync_interval=self.sync_interval,
            buffer_capacity=self.buffer_capacity, learning_rate=self.learning_rate,
            learning_rate_end=self.learning_rate_end, lr_decay_steps=self.lr_decay_steps,
            total_steps=self.total_steps, hidden_sizes=tuple(self.hidden_sizes),
            literal_argmin=self.literal_argmin, eval_channels=self.eval_channels)

    def env_options(self) -> EnvOptions:
        return EnvOptions(self.bandwidth_policy, self.cap_selection, self.delta, self.horizon,
                          self.penalty_multiplier, self.literal_reward, self.mean_gain)

    def _fit(self, config):
        self.result_ = train(config, self.agent_config(), self.env_options(), self.random_state)
        self.net_ = self.result_.net
        self.path_ = self.result_.ratios_path
        self.cost_trace_ = self.result_.cost_trace
        self.log_ = self.result_.log

    def _ratios(self, gains, cap):
        return best_on_path(self.config_, self.bandwidth_policy, self.path_, gains, cap)[0]
