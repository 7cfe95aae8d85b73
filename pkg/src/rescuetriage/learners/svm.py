"""Linear SVM trained by subgradient descent, with Platt-scaled probabilities.

Hinge loss gives margins, not probabilities; a sigmoid over the margin is
fitted on a held-out calibration fold (Platt scaling, Newton iterations with
the standard smoothed targets).
"""

from __future__ import annotations

import numpy as np

from ..errors import FitError
from .base import BaseClassifier, check_X_y
from .linear import sigmoid


def fit_platt(scores, y, max_iter=100, sigma=1e-12):
    """Fit (A, B) of p = 1/(1+exp(A*f+B)) by Newton descent with backtracking."""
    scores = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_pos = float(y.sum())
    n_neg = float(len(y) - n_pos)
    t = np.where(y == 1.0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def objective(a, b):
        z = a * scores + b
        # sum over i of log(1+e^z) + (t-1)*z, stable on both signs
        return float(np.sum(np.logaddexp(0.0, z) + (t - 1.0) * z))

    A, B = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    f_old = objective(A, B)
    for _ in range(max_iter):
        z = A * scores + B
        p = sigmoid(-z)  # modelled P(y=1)
        pq = p * (1.0 - p)
        g1 = float(np.sum((t - p) * scores))
        g2 = float(np.sum(t - p))
        if abs(g1) < 1e-10 and abs(g2) < 1e-10:
            break
        h11 = float(np.sum(pq * scores * scores)) + sigma
        h22 = float(np.sum(pq)) + sigma
        h21 = float(np.sum(pq * scores))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        step = 1.0
        while step >= 1e-10:
            a_new, b_new = A + step * dA, B + step * dB
            f_new = objective(a_new, b_new)
            if f_new < f_old + 1e-12:
                A, B, f_old = a_new, b_new, f_new
                break
            step /= 2.0
        else:
            break
    return A, B


class LinearSvmClassifier(BaseClassifier):
    family = "svm"
    supports_importance = True

    def __init__(
        self,
        reg=1e-3,
        learning_rate=0.1,
        epochs=500,
        calibration_fraction=0.2,
        seed=0,
    ):
        self.reg = reg
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.calibration_fraction = calibration_fraction
        self.seed = seed

    def _split_calibration(self, y, rng):
        calib = []
        for cls in (0.0, 1.0):
            members = np.flatnonzero(y == cls)
            if members.size < 2:
                raise FitError("svm needs at least 2 rows per class for calibration")
            members = rng.permutation(members)
            take = max(1, int(np.ceil(self.calibration_fraction * members.size)))
            calib.append(members[:take])
        calib = np.sort(np.concatenate(calib))
        train = np.setdiff1d(np.arange(len(y)), calib)
        return train, calib

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        rng = np.random.default_rng(self.seed)
        train, calib = self._split_calibration(y, rng)
        Xt, yt = X[train], y[train]
        signs = 2.0 * yt - 1.0

        w = np.zeros(X.shape[1])
        b = 0.0
        n = Xt.shape[0]
        for _ in range(self.epochs):
            margin = signs * (Xt @ w + b)
            violating = margin < 1.0
            grad_w = self.reg * w - (signs[violating] @ Xt[violating]) / n
            grad_b = -signs[violating].sum() / n
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        self.weights_ = w
        self.intercept_ = b

        calib_scores = X[calib] @ w + b
        self.platt_a_, self.platt_b_ = fit_platt(calib_scores, y[calib])
        return self

    def decision_scores(self, X) -> np.ndarray:
        X = self._check_width(X)
        return X @ self.weights_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        return sigmoid(-(self.platt_a_ * scores + self.platt_b_))

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
            "platt_a": self.platt_a_,
            "platt_b": self.platt_b_,
        }

    @classmethod
    def from_state(cls, state: dict) -> "LinearSvmClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.weights_ = np.asarray(state["weights"], dtype=np.float64)
        model.intercept_ = float(state["intercept"])
        model.platt_a_ = float(state["platt_a"])
        model.platt_b_ = float(state["platt_b"])
        return model
