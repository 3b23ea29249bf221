"""Latency and energy cost of one offloading decision.

Each user splits its task: the fraction ``A_n`` travels over an orthogonal
bandwidth slice to one CAP and is computed there, the rest runs locally.
Totals are summed over users and scalarised as
``phi = lambda * t_total + (1 - lambda) * e_total``.

Conventions:

* Local time uses the user's own capacity ``f_n``.
* Transmission energy is transmission time times transmit power.
* Transmission time is ``bits / rate``. With
  ``SystemConfig.literal_transmission_formula`` it is multiplied by the
  cycles-per-bit factor as well.
* A CAP's capacity is split equally among the users actively offloading to it.
* Result feedback costs nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .exceptions import ConstraintError, DomainError, InfeasibleOffloadError

BANDWIDTH_RTOL = 1e-9

# per_user column order
T_LOCAL, T_TRAN, T_CAP, E_LOCAL, E_TRAN = range(5)


@dataclass(frozen=True)
class CostBreakdown:
    t_total: float
    e_total: float
    phi: float
    per_user: np.ndarray | None = None  # (N, 5): t_local, t_tran, t_cap, e_local, e_tran


def _check_scalar(name, value, *, positive=False):
    if not math.isfinite(value) or value < 0 or (positive and value == 0):
        bound = "> 0" if positive else ">= 0"
        raise DomainError(f"{name} must be finite and {bound}, got {value!r}")


def transmission_rate(w_hz: float, p_watts: float, gain: float, noise: float) -> float:
    """Shannon rate in bits/s of a link with bandwidth ``w_hz``."""
    _check_scalar("w_hz", w_hz)
    _check_scalar("p_watts", p_watts)
    _check_scalar("gain", gain)
    _check_scalar("noise", noise, positive=True)
    if w_hz == 0:
        return 0.0
    return w_hz * math.log2(1.0 + p_watts * gain / noise)


def _check_ratio(alpha_n):
    if not 0.0 <= alpha_n <= 1.0:
        raise DomainError(f"offloading ratio must lie in [0, 1], got {alpha_n!r}")


def local_cost(l_mbits, alpha_n, f_n, gamma_bits, omega_cpb, p_local):
    """(seconds, joules) spent computing the non-offloaded part on the device."""
    _check_ratio(alpha_n)
    if not f_n > 0:
        raise DomainError(f"local capacity must be > 0, got {f_n!r}")
    t = l_mbits * gamma_bits * omega_cpb * (1.0 - alpha_n) / f_n
    return t, t * p_local


def offload_cost(l_mbits, alpha_n, rate_bps, gamma_bits, omega_cpb, p_tran, literal=False):
    """(seconds, joules) spent uploading the offloaded part."""
    _check_ratio(alpha_n)
    if alpha_n == 0:
        return 0.0, 0.0
    if rate_bps <= 0:
        raise InfeasibleOffloadError(None, "positive offload over a zero-rate link")
    t = l_mbits * gamma_bits * alpha_n / rate_bps
    if literal:
        t *= omega_cpb
    return t, t * p_tran


def cap_compute_time(l_mbits, alpha_n, f_eff, gamma_bits, omega_cpb):
    _check_ratio(alpha_n)
    if alpha_n == 0:
        return 0.0
    if not f_eff > 0:
        raise DomainError(f"allocated CAP capacity must be > 0, got {f_eff!r}")
    return l_mbits * gamma_bits * omega_cpb * alpha_n / f_eff


def effective_cap_capacity(cap_f: float, n_active: int) -> float:
    """Equal share of a CAP's cycles among the users offloading to it."""
    return cap_f / max(int(n_active), 1)


def user_costs(config: SystemConfig, ratio, rate, f_eff):
    """Per-user cost components, broadcast over leading axes.

    ``ratio``, ``rate`` and ``f_eff`` have trailing axis N. Entries with a
    positive ratio and zero rate come back as ``inf``.
    """
    ratio = np.asarray(ratio, dtype=float)
    offloading = ratio > 0
    t_local = config.task_cycles * (1.0 - ratio) / config.f_user
    bits = config.task_bits * ratio
    if config.literal_transmission_formula:
        bits = bits * config.cycles_per_bit
    with np.errstate(divide="ignore", invalid="ignore"):
        t_tran = np.where(offloading, bits / rate, 0.0)
        t_cap = np.where(offloading, config.task_cycles * ratio / f_eff, 0.0)
    t_tran = np.where(offloading & ~(rate > 0), np.inf, t_tran)
    return t_local, t_tran, t_cap, t_local * config.p_local, t_tran * config.p_tran


def weighted(config: SystemConfig, t_total, e_total):
    lam = config.lambda_weight
    return lam * t_total + (1.0 - lam) * e_total


def _check_offload_matrix(config, alpha):
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (config.n_users, config.n_caps):
        raise ConstraintError("C1", f"offload matrix must have shape "
                              f"{(config.n_users, config.n_caps)}, got {alpha.shape}")
    if not np.all(np.isfinite(alpha)) or np.any(alpha < 0) or np.any(alpha > 1):
        raise ConstraintError("C1", "offloading fractions must lie in [0, 1]")
    if np.any((alpha > 0).sum(axis=1) > 1):
        raise ConstraintError("C1", "a user may offload to at most one CAP")
    return alpha


def _check_bandwidth(config, bandwidth):
    w = np.asarray(bandwidth, dtype=float)
    if w.shape != (config.n_users,):
        raise ConstraintError("C2", f"bandwidth must have {config.n_users} entries")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ConstraintError("C2", "bandwidth slices must be finite and >= 0")
    total = config.total_bandwidth_hz
    if abs(w.sum() - total) > BANDWIDTH_RTOL * total:
        raise ConstraintError("C2", f"bandwidth sums to {w.sum()!r}, expected {total!r}")
    return w


def check_gains(config, gains):
    g = np.asarray(gains, dtype=float)
    if g.shape != (config.n_users, config.n_caps):
        raise DomainError(f"gains must have shape {(config.n_users, config.n_caps)}, got {g.shape}")
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise DomainError("channel gains must be finite and >= 0")
    return g


def evaluate(config: SystemConfig, alpha, gains, bandwidth, *, share_capacity: bool = True) -> CostBreakdown:
    """Cost of offloading matrix ``alpha`` under channel ``gains`` and per-user ``bandwidth``.

    Raises ConstraintError when ``alpha`` or ``bandwidth`` is infeasible and
    InfeasibleOffloadError when a user offloads over a zero-rate link. With
    ``share_capacity=False`` every offloading user gets its CAP's full
    capacity.
    """
    alpha = _check_offload_matrix(config, alpha)
    w = _check_bandwidth(config, bandwidth)
    g = check_gains(config, gains)

    ratio = alpha.sum(axis=1)
    cap = alpha.argmax(axis=1)
    users = np.arange(config.n_users)
    snr = config.p_tran * g[users, cap] / config.noise_power
    rate = w * np.log2(1.0 + snr)

    if share_capacity:
        n_active = (alpha > 0).sum(axis=0)
        f_eff = config.f_cap[cap] / np.maximum(n_active[cap], 1)
    else:
        f_eff = config.f_cap[cap]

    blocked = (ratio > 0) & ~(rate > 0)
    if blocked.any():
        raise InfeasibleOffloadError(int(np.flatnonzero(blocked)[0]))

    parts = user_costs(config, ratio, rate, f_eff)
    per_user = np.column_stack(parts)
    t_total = float(np.sum(parts[T_LOCAL] + parts[T_TRAN] + parts[T_CAP]))
    e_total = float(np.sum(parts[E_LOCAL] + parts[E_TRAN]))
    return CostBreakdown(t_total, e_total, float(weighted(config, t_total, e_total)), per_user)


def single_cap_phi(config: SystemConfig, ratios, gains_at_cap, bandwidth, cap: int,
                   *, share_capacity: bool = True) -> np.ndarray:
    """Vectorised ``phi`` when every offloading user targets CAP ``cap``.

    ``cap`` may also be an integer array broadcasting against the leading axes.

    ``ratios``, ``gains_at_cap`` and ``bandwidth`` broadcast over leading axes
    with trailing axis N. No constraint checks; an infeasible offload yields
    ``inf``. Used in the hot paths of the environment and the grid oracle.
    """
    ratios = np.asarray(ratios, dtype=float)
    rate = bandwidth * np.log2(1.0 + config.p_tran * gains_at_cap / config.noise_power)
    f_cap = config.f_cap[cap]
    if share_capacity:
        n_active = np.count_nonzero(ratios > 0, axis=-1)[..., None]
        f_eff = f_cap / np.maximum(n_active, 1)
    else:
        f_eff = f_cap
    t_local, t_tran, t_cap, e_local, e_tran = user_costs(config, ratios, rate, f_eff)
    t_total = np.sum(t_local + t_tran + t_cap, axis=-1)
    e_total = np.sum(e_local + e_tran, axis=-1)
    return weighted(config, t_total, e_total)


def offload_matrix(ratios, cap: int, n_caps: int) -> np.ndarray:
    """Place per-user ratios in column ``cap`` of an N x M matrix."""
    ratios = np.asarray(ratios, dtype=float)
    alpha = np.zeros((ratios.shape[-1], n_caps))
    alpha[:, cap] = ratios
    return alpha
