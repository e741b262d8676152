"""Fully connected ReLU regressor trained by mini-batch SGD with momentum."""

from __future__ import annotations

import logging
import warnings
from typing import List, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import ConvergenceWarning

from ._base import check_array, check_is_fitted, check_n_features, check_X_y

log = logging.getLogger(__name__)

__all__ = ["MLPRegressor", "init_params", "forward", "loss_and_grads", "gradient_check"]

Params = List[Tuple[np.ndarray, np.ndarray]]


def init_params(layer_sizes: Sequence[int], rng: np.random.Generator) -> Params:
    """He-uniform weights, zero biases."""
    params = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / fan_in)
        params.append((rng.uniform(-limit, limit, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return params


def forward(params: Params, X: np.ndarray):
    """Network output plus the activations needed for backprop."""
    acts = [X]
    h = X
    for W, b in params[:-1]:
        h = np.maximum(h @ W + b, 0.0)
        acts.append(h)
    W, b = params[-1]
    return (h @ W + b).ravel(), acts


def loss_and_grads(params: Params, X: np.ndarray, y: np.ndarray):
    """Mean squared error ``mean((f(X) - y)^2)`` and its parameter gradients."""
    out, acts = forward(params, X)
    diff = out - y
    loss = float(np.mean(diff ** 2))
    delta = (2.0 / len(y)) * diff[:, None]
    grads = [None] * len(params)
    for layer in range(len(params) - 1, -1, -1):
        W, _ = params[layer]
        a = acts[layer]
        grads[layer] = (a.T @ delta, delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ W.T) * (a > 0)
    return loss, grads


def gradient_check(params: Params, X: np.ndarray, y: np.ndarray, step: float = 1e-5) -> float:
    """Largest relative disagreement between backprop and central differences.

    Relative error per entry is ``|a - b| / max(|a| + |b|, 1e-8)``.
    """
    _, grads = loss_and_grads(params, X, y)
    worst = 0.0
    for layer, (W, b) in enumerate(params):
        for arr, g in ((W, grads[layer][0]), (b, grads[layer][1])):
            flat, gflat = arr.reshape(-1), g.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                lp, _ = loss_and_grads(params, X, y)
                flat[i] = orig - step
                lm, _ = loss_and_grads(params, X, y)
                flat[i] = orig
                fd = (lp - lm) / (2 * step)
                rel = abs(fd - gflat[i]) / max(abs(fd) + abs(gflat[i]), 1e-8)
                worst = max(worst, rel)
    return worst


class MLPRegressor(RegressorMixin, BaseEstimator):
    """Single-output multilayer perceptron.

    Targets are standardized internally before training and mapped back on
    prediction. ``loss_curve_`` holds the full-training-set MSE (in
    standardized units) before the first epoch and after each epoch.
    """

    def __init__(self, hidden_layer_sizes=(64, 64), learning_rate: float = 1e-3,
                 momentum: float = 0.9, n_epochs: int = 200, batch_size: int = 256,
                 random_state: int = 0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.n_epochs = n_epochs
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        sizes = [X.shape[1], *map(int, self.hidden_layer_sizes), 1]
        if min(sizes) < 1:
            raise ValueError(f"layer sizes must be >= 1, got {sizes}")
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise ValueError("learning_rate must be > 0 and momentum in [0, 1)")
        rng = np.random.default_rng(self.random_state)
        params = init_params(sizes, rng)

        self.y_mean_ = float(y.mean())
        self.y_scale_ = float(y.std()) or 1.0
        t = (y - self.y_mean_) / self.y_scale_

        velocity = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
        curve = [loss_and_grads(params, X, t)[0]]
        batch = max(1, int(self.batch_size))
        for epoch in range(int(self.n_epochs)):
            order = rng.permutation(len(X))
            for start in range(0, len(X), batch):
                sel = order[start:start + batch]
                _, grads = loss_and_grads(params, X[sel], t[sel])
                for layer, ((W, b), (gW, gb), (vW, vb)) in enumerate(zip(params, grads, velocity)):
                    vW *= self.momentum
                    vW -= self.learning_rate * gW
                    vb *= self.momentum
                    vb -= self.learning_rate * gb
                    W += vW
                    b += vb
            loss = float(np.mean((forward(params, X)[0] - t) ** 2))
            if not np.isfinite(loss):
                raise FloatingPointError(f"MLP training diverged at epoch {epoch}: loss={loss}")
            curve.append(loss)

        self.params_ = params
        self.loss_curve_ = curve
        self.n_iter_ = int(self.n_epochs)
        self.n_features_in_ = X.shape[1]
        if curve[-1] >= curve[0]:
            warnings.warn(f"MLP training loss did not decrease ({curve[0]:.4g} -> {curve[-1]:.4g}) "
                          f"after {self.n_epochs} epochs", ConvergenceWarning)
        log.debug("MLP fit: %d epochs, loss %.4g -> %.4g", self.n_epochs, curve[0], curve[-1])
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = check_array(X)
        check_n_features(self, X)
        return forward(self.params_, X)[0] * self.y_scale_ + self.y_mean_
