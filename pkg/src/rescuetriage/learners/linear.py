"""Logistic regression via full-batch gradient descent on cross-entropy."""

from __future__ import annotations

import numpy as np

from .base import BaseClassifier, check_X_y


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_grad(weights, intercept, X, y, l2=0.0):
    """Mean cross-entropy + 0.5*l2*||w||^2 and its gradient (w, b).

    Kept separate from the estimator so tests can difference it numerically.
    """
    z = X @ weights + intercept
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(weights @ weights)
    residual = sigmoid(z) - y
    grad_w = X.T @ residual / X.shape[0] + l2 * weights
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


class LogisticRegressionClassifier(BaseClassifier):
    family = "lr"
    supports_importance = True

    def __init__(self, learning_rate=0.5, epochs=500, l2=0.0):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        w = np.zeros(X.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            _, grad_w, grad_b = logistic_loss_and_grad(w, b, X, y, self.l2)
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        self.weights_ = w
        self.intercept_ = b
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        return sigmoid(X @ self.weights_ + self.intercept_)

    def feature_importance(self):
        self._check_fitted()
        magnitude = np.abs(self.weights_)
        total = magnitude.sum()
        return magnitude / total if total > 0 else np.zeros_like(magnitude)

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": self.get_params(),
            "feature_names": list(self.feature_names_),
            "weights": self.weights_.tolist(),
            "intercept": self.intercept_,
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogisticRegressionClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.weights_ = np.asarray(state["weights"], dtype=np.float64)
        model.intercept_ = float(state["intercept"])
        return model
