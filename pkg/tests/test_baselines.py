import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mecoffload.bandwidth import as_policy
from mecoffload.baselines import all_cap, all_local, grid_search, grid_size
from mecoffload.config import SystemConfig
from mecoffload.exceptions import EnumerationTooLarge, InfeasibleOffloadError
from mecoffload.model import evaluate, offload_matrix


def test_all_local_single_user(cfg1):
    assert all_local(cfg1).phi == pytest.approx(7.571, rel=1e-4)


def test_all_local_pure_latency(cfg5):
    cfg = cfg5.replace(lambda_weight=1.0)
    want = sum(l * 1e6 * 100 / f for l, f in zip(cfg.task_mbits, cfg.user_cycles_per_sec))
    assert all_local(cfg).phi == pytest.approx(want, rel=1e-12)


def test_all_local_scales_with_user_speed(cfg5):
    fast = cfg5.replace(user_cycles_per_sec=[2 * f for f in cfg5.user_cycles_per_sec])
    assert all_local(fast).t_total == pytest.approx(all_local(cfg5).t_total / 2, rel=1e-12)


def test_all_cap_has_no_local_part(cfg1):
    out = all_cap(cfg1, [[1.5]])
    assert out.per_user[0, 0] == 0 and out.per_user[0, 3] == 0


def test_all_cap_strong_channel_limit(cfg1):
    cfg = cfg1.replace(lambda_weight=1.0)
    cap_only = 5.3e6 * 100 / 6.3e8
    excess = [all_cap(cfg, [[g]]).phi - cap_only for g in (1e3, 1e6, 1e12, 1e300)]
    assert all(b < a for a, b in zip(excess, excess[1:]))
    assert 0 < excess[-1] < 1e-3 * cap_only


def test_all_cap_zero_gain(cfg1):
    with pytest.raises(InfeasibleOffloadError):
        all_cap(cfg1, [[0.0]])


def test_all_cap_regression(cfg5):
    g = np.random.default_rng(0).exponential(2.0, (5, 2))
    assert all_cap(cfg5, g).phi == all_cap(cfg5, g.copy()).phi


def test_grid_size_and_count():
    cfg = SystemConfig.defaults(2, 1)
    res = grid_search(cfg, [[1.0], [2.0]], step=0.5)
    assert res.evaluations == 9 == grid_size(2, 0.5)


def test_enumeration_guard(cfg5):
    with pytest.raises(EnumerationTooLarge) as info:
        grid_search(cfg5, np.ones((5, 2)), step=0.1, max_candidates=1000)
    assert info.value.size == 11**5


def brute_force(cfg, gains, policy, step):
    k = round(1 / step)
    cap = int(np.argmax(np.min(gains, axis=0)))
    best, arg = np.inf, None
    for levels in itertools.product(range(k + 1), repeat=cfg.n_users):
        r = np.array(levels) / k
        w = as_policy(policy).allocate(cfg.total_bandwidth_hz, cfg.task_mbits, r)
        try:
            phi = evaluate(cfg, offload_matrix(r, cap, cfg.n_caps), gains, w).phi
        except InfeasibleOffloadError:
            continue
        if phi < best:
            best, arg = phi, r
    return best, arg


@pytest.mark.parametrize("policy", ["equal", "length", "ratio"])
def test_matches_brute_force(policy):
    cfg = SystemConfig.defaults(3, 2)
    gains = np.random.default_rng(4).exponential(2.0, (3, 2))
    res = grid_search(cfg, gains, policy, step=0.25)
    best, arg = brute_force(cfg, gains, policy, 0.25)
    assert res.best_phi == pytest.approx(best, rel=1e-12)
    assert np.array_equal(res.best_alpha.sum(axis=1), arg)


def test_pinned_three_user_minimizer():
    cfg = SystemConfig.defaults(3, 2)
    gains = np.array([[1.2, 0.4], [2.5, 3.1], [0.9, 1.7]])
    res = grid_search(cfg, gains, step=0.1)
    assert res.evaluations == 11**3
    best, arg = brute_force(cfg, gains, "equal", 0.1)
    assert np.allclose(res.best_alpha.sum(axis=1), arg)
    assert res.best_phi == pytest.approx(best, rel=1e-12)


def test_ties_prefer_lexicographically_smallest():
    cfg = SystemConfig.defaults(2, 1, task_mbits=[0.0, 0.0])
    res = grid_search(cfg, [[1.0], [1.0]], step=0.5)
    assert res.best_phi == 0.0
    assert np.array_equal(res.best_alpha, np.zeros((2, 1)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_single_user_endpoint_property(seed):
    rng = np.random.default_rng(seed)
    cfg = SystemConfig(1, 1, [rng.uniform(0.5, 6)], [rng.uniform(1e7, 3e8)], [rng.uniform(1e8, 1e9)],
                       [rng.uniform(0.5, 3)], [rng.uniform(0.5, 3)], lambda_weight=float(rng.random()))
    res = grid_search(cfg, [[rng.exponential(2) + 1e-3]], step=0.1, share_capacity=False)
    assert res.best_alpha[0, 0] in (0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), policy=st.sampled_from(["equal", "length", "ratio"]))
def test_oracle_lower_bounds_corners(seed, policy):
    rng = np.random.default_rng(seed)
    cfg = SystemConfig.defaults(3, 2, lambda_weight=float(rng.random()))
    gains = rng.exponential(2.0, (3, 2)) + 1e-3
    res = grid_search(cfg, gains, policy, step=0.2)
    assert res.best_phi <= all_local(cfg).phi
    assert res.best_phi <= all_cap(cfg, gains, policy).phi * (1 + 1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_all_local_channel_independent(seed):
    cfg = SystemConfig.defaults(4, 2)
    rng = np.random.default_rng(seed)
    a = evaluate(cfg, np.zeros((4, 2)), rng.exponential(2, (4, 2)), np.full(4, 2.5e6)).phi
    b = evaluate(cfg, np.zeros((4, 2)), rng.exponential(2, (4, 2)), np.full(4, 2.5e6)).phi
    assert a == b == all_local(cfg).phi
