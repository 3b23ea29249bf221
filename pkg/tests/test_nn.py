import time

import numpy as np
import pytest

from mecoffload.exceptions import NumericError, ShapeError
from mecoffload.nn import Mlp


def numeric_grads(net, x, a, y, eps=1e-5):
    def loss(p):
        net.set_parameters(p)
        q = net.forward(x)[np.arange(len(x)), a]
        return np.mean((q - y) ** 2)

    flat = net.parameters().copy()
    out = np.empty_like(flat)
    for k in range(flat.size):
        step = np.zeros_like(flat)
        step[k] = eps
        out[k] = (loss(flat + step) - loss(flat - step)) / (2 * eps)
    net.set_parameters(flat)
    return out


def flat_grads(gw, gb):
    return np.concatenate([g.ravel() for pair in zip(gw, gb) for g in pair])


def gradient_check(seed):
    rng = np.random.default_rng(seed)
    net = Mlp((4, 8, 8, 4), seed=seed)
    for b in net.biases:
        b[...] = rng.normal(0, 0.1, b.shape)
    x = rng.normal(size=(6, 4))
    a = rng.integers(4, size=6)
    y = rng.normal(size=6)
    _, gw, gb = net.gradients(x, a, y)
    analytic = flat_grads(gw, gb)
    numeric = numeric_grads(net, x, a, y)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


def test_gradient_matches_finite_differences():
    start = time.perf_counter()
    worst = max(gradient_check(s) for s in range(3))
    assert worst < 1e-4
    assert time.perf_counter() - start < 10


def test_zero_network_outputs_zero():
    net = Mlp((3, 5, 5, 4), seed=0)
    net.set_parameters(np.zeros_like(net.parameters()))
    assert np.array_equal(net.forward([1.0, -2.0, 3.0]), np.zeros(4))


def test_hand_computed_2222():
    w = [np.array([[1.0, -1.0], [0.5, 2.0]]), np.array([[1.0, 0.0], [0.0, 1.0]]),
         np.array([[2.0, 1.0], [-1.0, 1.0]])]
    b = [np.array([0.0, 0.5]), np.array([-1.0, 0.0]), np.array([0.1, 0.0])]
    net = Mlp.from_params(w, b)
    # x=[1,2]: h1 = relu([2, 3.5]) ; h2 = relu([1, 3.5]) ; out = [2-3.5+0.1, 1+3.5]
    assert np.allclose(net.forward([1.0, 2.0]), [-1.4, 4.5])


def test_output_shapes():
    net = Mlp((5, 64, 64, 10), seed=1)
    assert net.forward(np.zeros(5)).shape == (10,)
    assert net.forward(np.zeros((7, 5))).shape == (7, 10)
    with pytest.raises(ShapeError):
        net.forward(np.zeros(4))


def test_init_reproducible_and_bounded():
    a, b = Mlp((4, 8, 2), seed=3), Mlp((4, 8, 2), seed=3)
    assert np.array_equal(a.parameters(), b.parameters())
    assert np.all(np.abs(a.weights[0]) <= np.sqrt(6 / 12))
    assert np.all(a.biases[0] == 0)


def test_forward_is_pure():
    net = Mlp((4, 8, 3), seed=0)
    x = np.arange(4.0)
    first = net.forward(x)
    net.forward(np.ones((5, 4)))
    assert np.array_equal(first, net.forward(x))


def test_sgd_zero_error_leaves_parameters():
    net = Mlp((4, 8, 3), seed=0)
    x = np.ones(4)
    q = net.forward(x)[1]
    before = net.parameters().copy()
    loss = net.sgd_step(x, 1, q, 0.1)
    assert loss == 0.0
    assert np.array_equal(before, net.parameters())


def test_sgd_loss_non_increasing():
    net = Mlp((4, 8, 8, 4), seed=2)
    x, a, y = np.array([0.3, -0.2, 0.8, 0.1]), 2, 3.0
    losses = [net.sgd_step(x, a, y, 1e-3) for _ in range(200)]
    assert all(l2 <= l1 + 1e-15 for l1, l2 in zip(losses, losses[1:]))
    assert losses[-1] < losses[0]


def test_only_chosen_output_moves():
    net = Mlp((3, 1, 3), seed=4)
    net.weights[0][...] = 1.0
    _, gw, gb = net.gradients(np.ones(3), 0, 10.0)
    assert np.all(gw[-1][:, 1:] == 0) and np.all(gb[-1][1:] == 0)


def test_non_finite_target():
    net = Mlp((2, 3, 2), seed=0)
    with pytest.raises(NumericError):
        net.sgd_step(np.zeros(2), 0, np.nan, 0.1)


def test_clone_into():
    src, dst = Mlp((4, 8, 3), seed=0), Mlp((4, 8, 3), seed=1)
    src.clone_into(dst)
    assert np.array_equal(src.parameters(), dst.parameters())
    x = np.random.default_rng(0).normal(size=(10, 4))
    assert np.array_equal(src(x), dst(x))
    src.sgd_step(x[0], 0, 5.0, 0.1)
    assert not np.array_equal(src.parameters(), dst.parameters())
    with pytest.raises(ShapeError):
        src.clone_into(Mlp((4, 9, 3)))


def test_save_load_round_trip(tmp_path):
    net = Mlp((5, 16, 16, 10), seed=8)
    net.sgd_step(np.ones(5), 3, 1.0, 0.05)
    path = tmp_path / "q.npz"
    net.save(path)
    back = Mlp.load(path)
    assert back.layer_dims == net.layer_dims
    for p, q in zip(net.weights + net.biases, back.weights + back.biases):
        assert p.tobytes() == q.tobytes()
