"""Common estimator contract: fit/predict_proba/get_params plus input checks.

Mirrors the familiar estimator API so models compose with generic selection
and tuning code: hyperparameters are constructor arguments, learned state
lives in trailing-underscore attributes, ``clone`` rebuilds an unfitted copy.
"""

from __future__ import annotations

import inspect

import numpy as np

from ..errors import DataError, FitError, NotFittedError, ShapeError


def check_array(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DataError(f"expected a 2-d feature matrix, got ndim={X.ndim}")
    if not np.isfinite(X).all():
        raise DataError("feature matrix contains NaN or infinite values")
    return X


def check_X_y(X, y, require_both_classes=True) -> tuple[np.ndarray, np.ndarray]:
    X = check_array(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
    if not np.isin(y, (0, 1)).all():
        raise DataError("labels must be 0/1")
    y = y.astype(np.float64)
    if X.shape[0] < 2:
        raise FitError("need at least 2 training rows")
    if require_both_classes and (y.min() == y.max()):
        raise FitError("training labels contain a single class")
    return X, y


class BaseClassifier:
    """Binary probabilistic classifier with a uniform surface."""

    family = "base"
    supports_importance = False

    def get_params(self) -> dict:
        names = [
            p.name
            for p in inspect.signature(type(self).__init__).parameters.values()
            if p.name != "self" and p.kind is not inspect.Parameter.VAR_KEYWORD
        ]
        return {name: getattr(self, name) for name in names}

    def set_params(self, **params) -> "BaseClassifier":
        valid = self.get_params()
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"unknown parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def clone(self, **overrides) -> "BaseClassifier":
        params = self.get_params()
        params.update(overrides)
        return type(self)(**params)

    # -- fitted-state helpers -------------------------------------------------

    def _set_fit_meta(self, X, feature_names):
        n, d = X.shape
        if feature_names is None:
            feature_names = [f"f{i}" for i in range(d)]
        if len(feature_names) != d:
            raise DataError(f"{len(feature_names)} feature names for {d} columns")
        self.feature_names_ = tuple(feature_names)
        self.n_features_ = d

    def _check_fitted(self):
        if getattr(self, "n_features_", None) is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted")

    def _check_width(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_array(X)
        if X.shape[1] != self.n_features_:
            raise ShapeError(
                f"expected {self.n_features_} features, got {X.shape[1]}"
            )
        return X

    # -- API implemented by subclasses ---------------------------------------

    def fit(self, X, y, feature_names=None) -> "BaseClassifier":
        raise NotImplementedError

    def predict_proba(self, X) -> np.ndarray:
        """Probability of the positive class, one value per row."""
        raise NotImplementedError

    def predict(self, X, threshold=0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def feature_importance(self):
        """Per-feature nonnegative scores summing to 1, or None if unsupported."""
        return None

    def to_state(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_state(cls, state: dict) -> "BaseClassifier":
        raise NotImplementedError
