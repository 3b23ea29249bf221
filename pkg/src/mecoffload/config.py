"""System parameters and their defaults.

The default user set has six members. Published task sizes exist for five of
them; the sixth user's task size is set to 4.0 Mb (``SIXTH_TASK_MBITS``) so
that sweeps over one to six users are defined.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .exceptions import DomainError

DEFAULT_USER_CYCLES = (1.4e8, 0.21e8, 0.95e8, 0.13e8, 0.53e8, 0.52e8)
SIXTH_TASK_MBITS = 4.0
DEFAULT_TASK_MBITS = (5.3, 3.5, 4.6, 3.0, 4.2, SIXTH_TASK_MBITS)
DEFAULT_CAP_CYCLES = 6.3e8
DEFAULT_P_TRAN = 2.0
DEFAULT_P_LOCAL = 3.0
DEFAULT_BANDWIDTH_HZ = 10e6
DEFAULT_CYCLES_PER_BIT = 100.0
DEFAULT_NOISE_POWER = 1.0
DEFAULT_LAMBDA = 0.5


def _as_tuple(values, name):
    try:
        return tuple(float(v) for v in values)
    except TypeError:
        raise DomainError(f"{name} must be a sequence of numbers") from None


@dataclass(frozen=True)
class SystemConfig:
    """Physical and weighting parameters of one MEC network.

    Per-user lists have length ``n_users`` and per-CAP lists have length
    ``n_caps``. Task sizes are in million bits; ``bits_per_mbit`` converts them
    to bits.
    """

    n_users: int
    n_caps: int
    task_mbits: Sequence[float]
    user_cycles_per_sec: Sequence[float]
    cap_cycles_per_sec: Sequence[float]
    p_tran_watts: Sequence[float]
    p_local_watts: Sequence[float]
    bits_per_mbit: float = 1e6
    cycles_per_bit: float = DEFAULT_CYCLES_PER_BIT
    noise_power: float = DEFAULT_NOISE_POWER
    total_bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    lambda_weight: float = DEFAULT_LAMBDA
    literal_transmission_formula: bool = False

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "n_users", int(self.n_users))
        set_(self, "n_caps", int(self.n_caps))
        for name in ("task_mbits", "user_cycles_per_sec", "cap_cycles_per_sec",
                     "p_tran_watts", "p_local_watts"):
            set_(self, name, _as_tuple(getattr(self, name), name))
        set_(self, "literal_transmission_formula", bool(self.literal_transmission_formula))
        self._validate()

    def _validate(self):
        if self.n_users < 1 or self.n_caps < 1:
            raise DomainError("n_users and n_caps must be at least 1")
        for name in ("task_mbits", "user_cycles_per_sec", "p_tran_watts", "p_local_watts"):
            if len(getattr(self, name)) != self.n_users:
                raise DomainError(f"{name} must have n_users={self.n_users} entries")
        if len(self.cap_cycles_per_sec) != self.n_caps:
            raise DomainError(f"cap_cycles_per_sec must have n_caps={self.n_caps} entries")
        # Zero-size tasks are allowed; every other quantity must be strictly positive.
        if any(not math.isfinite(v) or v < 0 for v in self.task_mbits):
            raise DomainError("task sizes must be finite and non-negative")
        for name in ("user_cycles_per_sec", "cap_cycles_per_sec", "p_tran_watts", "p_local_watts"):
            if any(not math.isfinite(v) or v <= 0 for v in getattr(self, name)):
                raise DomainError(f"{name} entries must be finite and > 0")
        for name in ("bits_per_mbit", "cycles_per_bit", "noise_power", "total_bandwidth_hz"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be finite and > 0")
        if not 0.0 <= self.lambda_weight <= 1.0:
            raise DomainError("lambda_weight must lie in [0, 1]")

    @classmethod
    def defaults(cls, n_users: int = 5, n_caps: int = 2, **overrides) -> "SystemConfig":
        """Default network with the first ``n_users`` of the six reference users."""
        if not 1 <= n_users <= len(DEFAULT_USER_CYCLES):
            raise DomainError(f"default user set has 1..{len(DEFAULT_USER_CYCLES)} users")
        params = dict(
            n_users=n_users,
            n_caps=n_caps,
            task_mbits=DEFAULT_TASK_MBITS[:n_users],
            user_cycles_per_sec=DEFAULT_USER_CYCLES[:n_users],
            cap_cycles_per_sec=(DEFAULT_CAP_CYCLES,) * n_caps,
            p_tran_watts=(DEFAULT_P_TRAN,) * n_users,
            p_local_watts=(DEFAULT_P_LOCAL,) * n_users,
        )
        params.update(overrides)
        return cls(**params)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    # numpy views used by the vectorised cost code
    @cached_property
    def task_bits(self) -> np.ndarray:
        return np.asarray(self.task_mbits) * self.bits_per_mbit

    @cached_property
    def task_cycles(self) -> np.ndarray:
        return self.task_bits * self.cycles_per_bit

    @cached_property
    def f_user(self) -> np.ndarray:
        return np.asarray(self.user_cycles_per_sec)

    @cached_property
    def f_cap(self) -> np.ndarray:
        return np.asarray(self.cap_cycles_per_sec)

    @cached_property
    def p_tran(self) -> np.ndarray:
        return np.asarray(self.p_tran_watts)

    @cached_property
    def p_local(self) -> np.ndarray:
        return np.asarray(self.p_local_watts)


def scaled_users(config: SystemConfig, n_users: int) -> SystemConfig:
    """Default-parameter config with ``n_users`` users and the other fields of ``config``."""
    base = SystemConfig.defaults(n_users, config.n_caps)
    return base.replace(
        cap_cycles_per_sec=config.cap_cycles_per_sec,
        bits_per_mbit=config.bits_per_mbit,
        cycles_per_bit=config.cycles_per_bit,
        noise_power=config.noise_power,
        total_bandwidth_hz=config.total_bandwidth_hz,
        lambda_weight=config.lambda_weight,
        literal_transmission_formula=config.literal_transmission_formula,
    )
