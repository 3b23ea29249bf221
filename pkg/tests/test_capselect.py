import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mecoffload.capselect import choose_cap, random_cap, select_cap
from mecoffload.exceptions import DomainError


def test_examples():
    c = select_cap([[1, 2], [3, 0.5]])
    assert (c.index, c.theta) == (0, 1.0)
    assert select_cap([[5]]).index == 0 and select_cap([[5]]).theta == 5
    assert select_cap([[2, 2], [2, 2]]).index == 0


def test_random_single_cap():
    rng = np.random.default_rng(0)
    assert {random_cap(rng, 1) for _ in range(100)} == {0}


def test_random_uniformity():
    rng = np.random.default_rng(1)
    draws = np.array([random_cap(rng, 4) for _ in range(100_000)])
    assert np.all(np.abs(np.bincount(draws, minlength=4) / draws.size - 0.25) < 0.005)


def test_random_determinism():
    r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
    assert [random_cap(r1, 5) for _ in range(50)] == [random_cap(r2, 5) for _ in range(50)]


def test_choose_cap_rules():
    g = [[1, 2], [3, 0.5]]
    assert choose_cap("maxmin", g) == 0
    assert choose_cap(1, g) == 1
    assert choose_cap("random", g, np.random.default_rng(0)) in (0, 1)
    with pytest.raises(DomainError):
        choose_cap("random", g)
    with pytest.raises(DomainError):
        choose_cap(2, g)
    with pytest.raises(DomainError):
        choose_cap("best", g)


gain_mats = arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 5)),
                   elements=st.floats(0, 100, allow_subnormal=False))


@settings(max_examples=200, deadline=None)
@given(g=gain_mats)
def test_brute_force_min_max(g):
    c = select_cap(g)
    thetas = [min(g[n][m] for n in range(g.shape[0])) for m in range(g.shape[1])]
    best = max(thetas)
    assert c.theta == best
    assert c.index == thetas.index(best)


@settings(max_examples=200, deadline=None)
@given(g=gain_mats, c=st.sampled_from([1e-3, 0.5, 3.0, 1e4]))
def test_scale_invariance(g, c):
    # exact power-of-two scaling keeps every comparison exact
    assert select_cap(g).index == select_cap(g * 2.0).index
    scaled = select_cap(g * c).index
    thetas = (g * c).min(axis=0)
    assert thetas[scaled] == thetas.max()
