"""K-nearest neighbors with deterministic tie-breaking by training-row index."""

from __future__ import annotations

import numpy as np

from ..errors import FitError
from .base import BaseClassifier, check_X_y


class KNeighborsClassifier(BaseClassifier):
    family = "knn"

    def __init__(self, k=5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k

    def fit(self, X, y, feature_names=None):
        # single-class training sets are allowed for this family
        X, y = check_X_y(X, y, require_both_classes=False)
        if X.shape[0] < self.k:
            raise FitError(f"need at least k={self.k} training rows, got {X.shape[0]}")
        self._set_fit_meta(X, feature_names)
        self.X_ = X
        self.y_ = y
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        n_train = self.X_.shape[0]
        row_index = np.arange(n_train)
        out = np.empty(X.shape[0])
        for i, x in enumerate(X):
            d2 = ((self.X_ - x) ** 2).sum(axis=1)
            # sort by (distance, index): equal distances prefer earlier rows
            order = np.lexsort((row_index, d2))
            out[i] = self.y_[order[: self.k]].mean()
        return out

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": self.get_params(),
            "feature_names": list(self.feature_names_),
            "X": self.X_.tolist(),
            "y": self.y_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "KNeighborsClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.X_ = np.asarray(state["X"], dtype=np.float64)
        model.y_ = np.asarray(state["y"], dtype=np.float64)
        return model
