"""Seeded experiment sweeps writing CSV results.

An experiment file is YAML with up to four sections::

    system:      # SystemConfig fields; missing ones take the default network
      n_users: 5
      n_caps: 2
      lambda_weight: 0.5
    env:         # bandwidth_policy, cap_selection, delta, horizon, penalty_multiplier, literal_reward
      cap_selection: maxmin
    agent:       # DQNOffloader training hyper-parameters
      total_steps: 20000
    experiment:
      sweep_variable: lambda          # lambda | n_users | bandwidth | cap_capacity
      sweep_values: [0.1, 0.5, 0.9]
      strategies: [E-DQN, All-Local, All-CAP]
      replicas: 3
      eval_draws: 64                  # channel draws per evaluation
      cap_draws: 1000                 # channel draws per CAP-selection comparison
      lambdas: [0.1, 0.5, 0.9]        # CAP-selection comparison weights
      output: results.csv

Bandwidth sweep values are in Hz. Replica ``i`` runs with seed
``base_seed + i``. Every output starts with ``#`` comment lines holding the
resolved configuration and seed list, followed by a header row. Rows are
written in (strategy, sweep value, seed) order regardless of how many worker
processes computed them, so reruns are byte-identical.
"""
from __future__ import annotations

import copy
import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import yaml
from joblib import Parallel, delayed

from .baselines import all_local, grid_search
from .capselect import choose_cap, random_cap, select_cap
from .channel import ChannelSampler
from .config import SystemConfig, scaled_users
from .estimators import AllCap, AllLocal, DQNOffloader, GridSearchOracle
from .exceptions import DomainError

logger = logging.getLogger(__name__)

DQN_STRATEGIES = {"E-DQN": "equal", "L-DQN": "length", "R-DQN": "ratio"}
BASELINES = ("All-Local", "All-CAP", "Oracle")
STRATEGIES = tuple(DQN_STRATEGIES) + BASELINES
SWEEP_VARIABLES = ("lambda", "n_users", "bandwidth", "cap_capacity")

ENV_KEYS = ("bandwidth_policy", "cap_selection", "delta", "horizon",
            "penalty_multiplier", "literal_reward")


@dataclass
class ExperimentSpec:
    system: dict = field(default_factory=dict)
    env: dict = field(default_factory=dict)
    agent: dict = field(default_factory=dict)
    sweep_variable: str = "lambda"
    sweep_values: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    strategies: list = field(default_factory=lambda: ["E-DQN", "All-Local", "All-CAP"])
    replicas: int = 1
    base_seed: int = 0
    eval_draws: int = 64
    cap_draws: int = 1000
    lambdas: list = field(default_factory=lambda: [0.1, 0.5, 0.9])
    output: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise DomainError(f"sweep_variable must be one of {SWEEP_VARIABLES}")
        if not self.sweep_values:
            raise DomainError("sweep_values must not be empty")
        if self.replicas < 1:
            raise DomainError("replicas must be >= 1")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise DomainError(f"unknown strategies {unknown}; choose from {STRATEGIES}")
        bad = [k for k in self.env if k not in ENV_KEYS]
        if bad:
            raise DomainError(f"unknown env keys {bad}")
        self.config()  # validates the system section

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.replicas)]

    def config(self) -> SystemConfig:
        params = dict(self.system)
        n = int(params.pop("n_users", 5))
        m = int(params.pop("n_caps", 2))
        if "task_mbits" in params or n > 6:
            return SystemConfig(n_users=n, n_caps=m, **params)
        return SystemConfig.defaults(n, m, **params)

    def resolved(self) -> dict:
        """Everything needed to rerun the experiment, as plain data."""
        return {
            "system": self.config().to_dict(),
            "env": dict(self.env),
            "agent": dict(self.agent),
            "experiment": {
                "sweep_variable": self.sweep_variable,
                "sweep_values": list(self.sweep_values),
                "strategies": list(self.strategies),
                "replicas": self.replicas,
                "base_seed": self.base_seed,
                "eval_draws": self.eval_draws,
                "cap_draws": self.cap_draws,
                "lambdas": list(self.lambdas),
            },
        }

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "ExperimentSpec":
        data = copy.deepcopy(data or {})
        exp = data.get("experiment", {}) or {}
        kwargs = dict(system=data.get("system") or {}, env=data.get("env") or {},
                      agent=data.get("agent") or {})
        for key in ("sweep_variable", "sweep_values", "strategies", "replicas", "base_seed",
                    "eval_draws", "cap_draws", "lambdas", "output", "jobs"):
            if key in exp:
                kwargs[key] = exp[key]
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh), **overrides)


# -- building blocks ------------------------------------------------------

def sweep_config(base: SystemConfig, variable: str, value) -> SystemConfig:
    if variable == "lambda":
        return base.replace(lambda_weight=float(value))
    if variable == "n_users":
        return scaled_users(base, int(value))
    if variable == "bandwidth":
        return base.replace(total_bandwidth_hz=float(value))
    if variable == "cap_capacity":
        return base.replace(cap_cycles_per_sec=(float(value),) * base.n_caps)
    raise DomainError(f"unknown sweep variable {variable!r}")


def eval_gains(config: SystemConfig, seed: int, draws: int, mean_gain: float = 2.0) -> np.ndarray:
    """Evaluation channel set for one replica; independent of the training streams."""
    sampler = ChannelSampler(np.random.SeedSequence([seed, 0xE7A1]), mean_gain)
    return np.stack([sampler.sample_gains(config.n_users, config.n_caps) for _ in range(draws)])


def make_dqn(spec: ExperimentSpec, policy: str, seed: int, **extra) -> DQNOffloader:
    params = {k: v for k, v in spec.env.items() if k != "bandwidth_policy"}
    params.update(spec.agent)
    params.update(extra)
    if "hidden_sizes" in params:
        params["hidden_sizes"] = tuple(params["hidden_sizes"])
    return DQNOffloader(bandwidth_policy=policy, random_state=seed, **params)


def strategy_cost(spec: ExperimentSpec, strategy: str, config: SystemConfig, seed: int) -> float:
    """Mean weighted cost of one strategy over the replica's evaluation channels."""
    gains = eval_gains(config, seed, spec.eval_draws)
    policy = spec.env.get("bandwidth_policy", "equal")
    cap_rule = spec.env.get("cap_selection", "maxmin")
    if strategy in DQN_STRATEGIES:
        est = make_dqn(spec, DQN_STRATEGIES[strategy], seed)
    elif strategy == "All-Local":
        est = AllLocal()
    elif strategy == "All-CAP":
        est = AllCap(policy, cap_rule, random_state=seed)
    else:
        est = GridSearchOracle(policy, cap_rule, step=spec.env.get("delta", 0.1), random_state=seed)
    est.fit(config)
    return -est.score(gains)


def _run(tasks, jobs):
    if jobs == 1:
        return [fn(*args) for fn, args in tasks]
    return Parallel(n_jobs=jobs)(delayed(fn)(*args) for fn, args in tasks)


# -- output ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def render_csv(command: str, spec: ExperimentSpec, columns: Sequence[str], rows) -> str:
    buf = io.StringIO(newline="")
    header = {"command": command, "seeds": spec.seeds, **spec.resolved()}
    for line in yaml.safe_dump(header, sort_keys=True, default_flow_style=None).splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- experiments ------------------------------------------------------------

def _trace(spec, strategy, config, seed):
    est = make_dqn(spec, DQN_STRATEGIES[strategy], seed).fit(config)
    return est.cost_trace_


def run_convergence(spec: ExperimentSpec) -> str:
    """Per-iteration greedy-decision cost for each DQN bandwidth variant."""
    config = spec.config()
    strategies = [s for s in spec.strategies if s in DQN_STRATEGIES] or list(DQN_STRATEGIES)
    tasks = [(_trace, (spec, s, config, seed)) for s in strategies for seed in spec.seeds]
    traces = _run(tasks, spec.jobs)
    rows = []
    keys = [(s, seed) for s in strategies for seed in spec.seeds]
    for (s, seed), trace in zip(keys, traces):
        rows.extend((s, seed, i, phi) for i, phi in enumerate(trace))
    text = render_csv("converge", spec, ["strategy", "seed", "iteration", "phi"], rows)
    if spec.output:
        write_csv(spec.output, text)
    return text


def run_sweep(spec: ExperimentSpec) -> str:
    """Final cost per (strategy, sweep value, seed)."""
    base = spec.config()
    keys = [(s, v, seed) for s in spec.strategies for v in spec.sweep_values for seed in spec.seeds]
    tasks = [(strategy_cost, (spec, s, sweep_config(base, spec.sweep_variable, v), seed))
             for s, v, seed in keys]
    costs = _run(tasks, spec.jobs)
    rows = [(s, v, seed, c) for (s, v, seed), c in zip(keys, costs)]
    text = render_csv("sweep", spec, ["strategy", spec.sweep_variable, "seed", "phi"], rows)
    if spec.output:
        write_csv(spec.output, text)
    return text


@dataclass
class CapComparison:
    lam: float
    seed: int
    maxmin: np.ndarray   # per-draw cost under max-min selection
    random: np.ndarray   # per-draw cost under random selection


def compare_cap_selection(spec: ExperimentSpec, lam: float, seed: int, est=None) -> CapComparison:
    """Cost of one trained E-DQN decision rule under both CAP selection rules.

    The greedy path does not depend on the serving CAP, so a single trained
    agent is scored on ``cap_draws`` channel draws with the max-min CAP and
    with a uniformly random CAP. Pass a fitted ``est`` to skip training.
    """
    config = spec.config().replace(lambda_weight=float(lam))
    if config.n_caps < 2:
        logger.info("single CAP: both selection rules coincide")
    if est is None:
        est = make_dqn(spec, "equal", seed, cap_selection="maxmin").fit(config)
    sampler = ChannelSampler(np.random.SeedSequence([seed, 0xCA95]))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7A4D]))
    gains = np.stack([sampler.sample_gains(config.n_users, config.n_caps) for _ in range(spec.cap_draws)])
    caps_mm = [select_cap(g).index for g in gains]
    caps_rand = [random_cap(rng, config.n_caps) for _ in gains]
    mm = np.array([c.phi for c in est.cost(gains, cap=caps_mm)])
    rnd = np.array([c.phi for c in est.cost(gains, cap=caps_rand)])
    return CapComparison(float(lam), seed, mm, rnd)


def run_cap_compare(spec: ExperimentSpec):
    """Mean cost per (selection rule, lambda, seed). Returns (csv text, comparisons)."""
    keys = [(lam, seed) for lam in spec.lambdas for seed in spec.seeds]
    results = _run([(compare_cap_selection, (spec, lam, seed)) for lam, seed in keys], spec.jobs)
    rows = []
    for rule in ("maxmin", "random"):
        for r in results:
            rows.append((rule, r.lam, r.seed, float(np.mean(getattr(r, rule)))))
    text = render_csv("cap-compare", spec, ["rule", "lambda", "seed", "phi"], rows)
    if spec.output:
        write_csv(spec.output, text)
    return text, results


def run_oracle(spec: ExperimentSpec) -> str:
    """Grid-search optimum on each replica's evaluation channels."""
    config = spec.config()
    policy = spec.env.get("bandwidth_policy", "equal")
    cap_rule = spec.env.get("cap_selection", "maxmin")
    step = spec.env.get("delta", 0.1)
    rows = []
    for seed in spec.seeds:
        rng = np.random.default_rng(seed)
        for k, g in enumerate(eval_gains(config, seed, spec.eval_draws)):
            cap = choose_cap(cap_rule, g, rng)
            res = grid_search(config, g, policy, step, cap_selection=cap)
            ratios = ";".join(_fmt(x) for x in res.best_alpha.sum(axis=1))
            rows.append((seed, k, cap, res.best_phi, ratios))
    text = render_csv("oracle", spec, ["seed", "draw", "cap", "phi", "ratios"], rows)
    if spec.output:
        write_csv(spec.output, text)
    return text


def run_eval(spec: ExperimentSpec) -> str:
    """Cost breakdown of the non-learning strategies on each evaluation channel."""
    config = spec.config()
    policy = spec.env.get("bandwidth_policy", "equal")
    cap_rule = spec.env.get("cap_selection", "maxmin")
    rows = []
    local = all_local(config)
    for seed in spec.seeds:
        cap_est = AllCap(policy, cap_rule, random_state=seed).fit(config)
        for k, g in enumerate(eval_gains(config, seed, spec.eval_draws)):
            rows.append(("All-Local", seed, k, local.t_total, local.e_total, local.phi))
            c = cap_est.cost(g)
            rows.append(("All-CAP", seed, k, c.t_total, c.e_total, c.phi))
    text = render_csv("eval", spec, ["strategy", "seed", "draw", "t_total", "e_total", "phi"], rows)
    if spec.output:
        write_csv(spec.output, text)
    return text
