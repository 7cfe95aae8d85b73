"""Two-hidden-layer feedforward net trained with Adam on binary cross-entropy.

The loss/gradient computation lives in a standalone function so tests can
check the analytic gradients against central finite differences.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import BaseClassifier, check_X_y
from .linear import sigmoid

PARAM_KEYS = ("W1", "b1", "W2", "b2", "W3", "b3")


def init_params(rng, n_inputs, hidden_sizes):
    h1, h2 = hidden_sizes
    return {
        "W1": rng.normal(0.0, np.sqrt(2.0 / n_inputs), size=(n_inputs, h1)),
        "b1": np.zeros(h1),
        "W2": rng.normal(0.0, np.sqrt(2.0 / h1), size=(h1, h2)),
        "b2": np.zeros(h2),
        "W3": rng.normal(0.0, np.sqrt(1.0 / h2), size=(h2, 1)),
        "b3": np.zeros(1),
    }


def forward_logits(params, X):
    z1 = X @ params["W1"] + params["b1"]
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ params["W2"] + params["b2"]
    a2 = np.maximum(z2, 0.0)
    z3 = (a2 @ params["W3"]).ravel() + params["b3"][0]
    return z3, (z1, a1, z2, a2)


def loss_and_grads(params, X, y):
    """Mean BCE over the batch and gradients for every parameter tensor."""
    n = X.shape[0]
    z3, (z1, a1, z2, a2) = forward_logits(params, X)
    loss = float(np.mean(np.logaddexp(0.0, z3) - y * z3))

    dz3 = (sigmoid(z3) - y) / n
    grads = {
        "W3": a2.T @ dz3[:, None],
        "b3": np.array([dz3.sum()]),
    }
    da2 = dz3[:, None] @ params["W3"].T
    dz2 = da2 * (z2 > 0.0)
    grads["W2"] = a1.T @ dz2
    grads["b2"] = dz2.sum(axis=0)
    da1 = dz2 @ params["W2"].T
    dz1 = da1 * (z1 > 0.0)
    grads["W1"] = X.T @ dz1
    grads["b1"] = dz1.sum(axis=0)
    return loss, grads


class NeuralNetClassifier(BaseClassifier):
    family = "ann"

    def __init__(
        self,
        hidden_sizes=(32, 16),
        epochs=200,
        batch_size=32,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        seed=0,
    ):
        if len(hidden_sizes) != 2:
            raise ConfigError("exactly two hidden layers are required")
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.seed = seed

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        n = X.shape[0]
        rng = np.random.default_rng(self.seed)
        params = init_params(rng, X.shape[1], self.hidden_sizes)

        m = {k: np.zeros_like(v) for k, v in params.items()}
        v = {k: np.zeros_like(p) for k, p in params.items()}
        t = 0
        self.train_loss_ = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                _, grads = loss_and_grads(params, X[batch], y[batch])
                t += 1
                for key in PARAM_KEYS:
                    g = grads[key]
                    m[key] = self.beta1 * m[key] + (1.0 - self.beta1) * g
                    v[key] = self.beta2 * v[key] + (1.0 - self.beta2) * g * g
                    m_hat = m[key] / (1.0 - self.beta1**t)
                    v_hat = v[key] / (1.0 - self.beta2**t)
                    params[key] = params[key] - self.learning_rate * m_hat / (
                        np.sqrt(v_hat) + self.eps
                    )
            epoch_loss, _ = loss_and_grads(params, X, y)
            self.train_loss_.append(epoch_loss)
        self.params_ = params
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        logits, _ = forward_logits(self.params_, X)
        return sigmoid(logits)

    def to_state(self) -> dict:
        self._check_fitted()
        params = self.get_params()
        params["hidden_sizes"] = list(self.hidden_sizes)
        return {
            "family": self.family,
            "hyperparameters": params,
            "feature_names": list(self.feature_names_),
            "params": {k: v.tolist() for k, v in self.params_.items()},
            "train_loss": list(self.train_loss_),
        }

    @classmethod
    def from_state(cls, state: dict) -> "NeuralNetClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.params_ = {
            k: np.asarray(v, dtype=np.float64) for k, v in state["params"].items()
        }
        model.train_loss_ = list(state["train_loss"])
        return model
