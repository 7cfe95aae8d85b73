"""Naive Bayes: Bernoulli likelihoods for flag columns, Gaussian for numerics."""

from __future__ import annotations

import numpy as np

from .base import BaseClassifier, check_X_y

_LOG_2PI = float(np.log(2.0 * np.pi))


def detect_binary_columns(X) -> np.ndarray:
    return np.array([np.isin(X[:, j], (0.0, 1.0)).all() for j in range(X.shape[1])])


class NaiveBayesClassifier(BaseClassifier):
    family = "nb"

    def __init__(self, alpha=1.0, binary_columns=None, var_floor=1e-9):
        self.alpha = alpha
        self.binary_columns = binary_columns
        self.var_floor = var_floor

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        d = X.shape[1]
        if self.binary_columns is None:
            binary = detect_binary_columns(X)
        else:
            binary = np.zeros(d, dtype=bool)
            binary[list(self.binary_columns)] = True
        self.binary_mask_ = binary

        self.class_log_prior_ = np.empty(2)
        self.bernoulli_p_ = np.empty((2, d))  # defined on binary columns only
        self.gauss_mean_ = np.empty((2, d))
        self.gauss_var_ = np.empty((2, d))
        for c in (0, 1):
            rows = X[y == c]
            n_c = rows.shape[0]
            self.class_log_prior_[c] = np.log(n_c / X.shape[0])
            self.bernoulli_p_[c] = (rows.sum(axis=0) + self.alpha) / (n_c + 2.0 * self.alpha)
            self.gauss_mean_[c] = rows.mean(axis=0)
            self.gauss_var_[c] = np.maximum(rows.var(axis=0), self.var_floor)
        return self

    def _joint_log_likelihood(self, X) -> np.ndarray:
        out = np.empty((X.shape[0], 2))
        b = self.binary_mask_
        for c in (0, 1):
            ll = np.full(X.shape[0], self.class_log_prior_[c])
            if b.any():
                p = self.bernoulli_p_[c, b]
                xb = X[:, b]
                ll += xb @ np.log(p) + (1.0 - xb) @ np.log(1.0 - p)
            if (~b).any():
                mean = self.gauss_mean_[c, ~b]
                var = self.gauss_var_[c, ~b]
                xg = X[:, ~b]
                ll += -0.5 * (
                    ((xg - mean) ** 2 / var) + np.log(var) + _LOG_2PI
                ).sum(axis=1)
            out[:, c] = ll
        return out

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        jll = self._joint_log_likelihood(X)
        shift = jll.max(axis=1, keepdims=True)
        expd = np.exp(jll - shift)
        return expd[:, 1] / expd.sum(axis=1)

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": {
                "alpha": self.alpha,
                "binary_columns": None
                if self.binary_columns is None
                else list(self.binary_columns),
                "var_floor": self.var_floor,
            },
            "feature_names": list(self.feature_names_),
            "binary_mask": [bool(v) for v in self.binary_mask_],
            "class_log_prior": self.class_log_prior_.tolist(),
            "bernoulli_p": self.bernoulli_p_.tolist(),
            "gauss_mean": self.gauss_mean_.tolist(),
            "gauss_var": self.gauss_var_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "NaiveBayesClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.binary_mask_ = np.asarray(state["binary_mask"], dtype=bool)
        model.class_log_prior_ = np.asarray(state["class_log_prior"], dtype=np.float64)
        model.bernoulli_p_ = np.asarray(state["bernoulli_p"], dtype=np.float64)
        model.gauss_mean_ = np.asarray(state["gauss_mean"], dtype=np.float64)
        model.gauss_var_ = np.asarray(state["gauss_var"], dtype=np.float64)
        return model
