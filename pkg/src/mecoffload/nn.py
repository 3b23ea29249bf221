"""Small fully connected Q-network with hand-written backpropagation.

ReLU on hidden layers, identity on the output. Weights of layer ``i`` are
stored as a ``(fan_in, fan_out)`` matrix so a batch ``X`` of shape
``(B, fan_in)`` maps to ``X @ W + b``.

Parameter files are ``.npz`` archives holding ``layer_dims`` (int64) plus
``W0, b0, W1, b1, ...`` in float64, which round-trips bit-exactly.
"""
from __future__ import annotations

import numpy as np

from .exceptions import NumericError, ShapeError


class Mlp:
    def __init__(self, layer_dims, seed=None):
        dims = tuple(int(d) for d in layer_dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ShapeError(f"invalid layer dims {layer_dims!r}")
        self.layer_dims = dims
        rng = np.random.default_rng(seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @classmethod
    def from_params(cls, weights, biases) -> "Mlp":
        dims = [weights[0].shape[0]] + [w.shape[1] for w in weights]
        net = cls(dims, seed=0)
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.shape != net.weights[i].shape or b.shape != net.biases[i].shape:
                raise ShapeError("parameter shapes do not form a chain")
            net.weights[i] = np.array(w, dtype=float)
            net.biases[i] = np.array(b, dtype=float)
        return net

    @property
    def n_inputs(self):
        return self.layer_dims[0]

    @property
    def n_outputs(self):
        return self.layer_dims[-1]

    def _check_input(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_inputs or x.ndim > 2:
            raise ShapeError(f"expected input of width {self.n_inputs}, got shape {x.shape}")
        return x

    def forward(self, x) -> np.ndarray:
        """Q-values for one state (1-D) or a batch of states (2-D)."""
        a = self._check_input(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w + b
            if i < last:
                a = np.maximum(a, 0.0)
        return a

    __call__ = forward

    def gradients(self, states, actions, targets):
        """Loss and parameter gradients for regressing ``Q(s)[a]`` onto ``targets``.

        The loss is the batch mean of ``(target - Q(s)[a])**2``; only the
        chosen action's output carries gradient.
        """
        x = np.atleast_2d(self._check_input(states))
        actions = np.atleast_1d(np.asarray(actions, dtype=np.intp))
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        if not np.all(np.isfinite(targets)):
            raise NumericError("non-finite TD target")
        if not (len(x) == len(actions) == len(targets)):
            raise ShapeError("states, actions and targets differ in length")

        acts = [x]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            acts.append(np.maximum(z, 0.0) if i < last else z)
        rows = np.arange(len(x))
        err = acts[-1][rows, actions] - targets
        loss = float(np.mean(err * err))

        delta = np.zeros_like(acts[-1])
        delta[rows, actions] = 2.0 * err / len(x)
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.weights)
        for i in range(last, -1, -1):
            grad_w[i] = acts[i].T @ delta
            grad_b[i] = delta.sum(axis=0)
            if i > 0:
                # ReLU derivative taken from the post-activation value
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        return loss, grad_w, grad_b

    def sgd_step(self, states, actions, targets, lr: float) -> float:
        """One plain gradient-descent step; returns the loss before the update."""
        if not lr > 0:
            raise ValueError("learning rate must be > 0")
        loss, grad_w, grad_b = self.gradients(states, actions, targets)
        for w, b, gw, gb in zip(self.weights, self.biases, grad_w, grad_b):
            w -= lr * gw
            b -= lr * gb
        return loss

    def clone_into(self, dst: "Mlp") -> None:
        if dst.layer_dims != self.layer_dims:
            raise ShapeError(f"architecture mismatch: {self.layer_dims} vs {dst.layer_dims}")
        for i in range(len(self.weights)):
            np.copyto(dst.weights[i], self.weights[i])
            np.copyto(dst.biases[i], self.biases[i])

    def copy(self) -> "Mlp":
        return Mlp.from_params(self.weights, self.biases)

    def parameters(self) -> np.ndarray:
        return np.concatenate([p.ravel() for pair in zip(self.weights, self.biases) for p in pair])

    def set_parameters(self, flat) -> None:
        flat = np.asarray(flat, dtype=float)
        pos = 0
        for p in (p for pair in zip(self.weights, self.biases) for p in pair):
            p[...] = flat[pos:pos + p.size].reshape(p.shape)
            pos += p.size
        if pos != flat.size:
            raise ShapeError("flat parameter vector has the wrong length")

    def save(self, path) -> None:
        arrays = {"layer_dims": np.asarray(self.layer_dims, dtype=np.int64)}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"W{i}"] = w
            arrays[f"b{i}"] = b
        with open(path, "wb") as fh:
            np.savez(fh, **arrays)

    @classmethod
    def load(cls, path) -> "Mlp":
        with np.load(path) as data:
            dims = data["layer_dims"]
            n = len(dims) - 1
            net = cls.from_params([data[f"W{i}"] for i in range(n)], [data[f"b{i}"] for i in range(n)])
        if net.layer_dims != tuple(int(d) for d in dims):
            raise ShapeError("stored layer_dims disagree with parameter shapes")
        return net
