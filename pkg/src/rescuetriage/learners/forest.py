"""Gini decision tree and bagged random forest."""

from __future__ import annotations

import numpy as np

from .base import BaseClassifier, check_X_y
from .tree import FlatTree, bin_features, grow_gini_tree


class DecisionTreeClassifier(BaseClassifier):
    family = "tree"
    supports_importance = True

    def __init__(self, max_depth=8, min_samples_leaf=1, max_bins=256):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_bins = max_bins

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        thresholds, codes = bin_features(X, self.max_bins)
        gains = np.zeros(X.shape[1])
        self.tree_ = grow_gini_tree(
            codes,
            thresholds,
            np.arange(X.shape[0]),
            y,
            self.max_depth,
            self.min_samples_leaf,
            gain_accumulator=gains,
        )
        total = gains.sum()
        self.importances_ = gains / total if total > 0 else np.zeros(X.shape[1])
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        return self.tree_.predict_value(X)

    def feature_importance(self):
        self._check_fitted()
        return self.importances_.copy()

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": self.get_params(),
            "feature_names": list(self.feature_names_),
            "tree": self.tree_.to_state(),
            "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "DecisionTreeClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.tree_ = FlatTree.from_state(state["tree"])
        model.importances_ = np.asarray(state["importances"], dtype=np.float64)
        return model


class RandomForestClassifier(BaseClassifier):
    """Bootstrap-bagged Gini trees; probability = mean of leaf class fractions."""

    family = "rf"
    supports_importance = True

    def __init__(
        self,
        n_trees=100,
        max_depth=8,
        min_samples_leaf=1,
        max_features="sqrt",
        max_bins=256,
        seed=0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.max_bins = max_bins
        self.seed = seed

    def _features_per_split(self, d) -> int | None:
        if self.max_features is None:
            return None
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(d)))
        return max(1, min(int(self.max_features), d))

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        n, d = X.shape
        thresholds, codes = bin_features(X, self.max_bins)
        m = self._features_per_split(d)
        gains = np.zeros(d)
        self.trees_ = []
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        for ss in seeds:
            rng = np.random.default_rng(ss)
            rows = np.sort(rng.choice(n, size=n, replace=True))
            self.trees_.append(
                grow_gini_tree(
                    codes,
                    thresholds,
                    rows,
                    y,
                    self.max_depth,
                    self.min_samples_leaf,
                    max_features=m,
                    rng=rng,
                    gain_accumulator=gains,
                )
            )
        total = gains.sum()
        self.importances_ = gains / total if total > 0 else np.zeros(d)
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_width(X)
        acc = np.zeros(X.shape[0])
        for tree in self.trees_:
            acc += tree.predict_value(X)
        return acc / len(self.trees_)

    def feature_importance(self):
        self._check_fitted()
        return self.importances_.copy()

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": self.get_params(),
            "feature_names": list(self.feature_names_),
            "trees": [t.to_state() for t in self.trees_],
            "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomForestClassifier":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.trees_ = [FlatTree.from_state(t) for t in state["trees"]]
        model.importances_ = np.asarray(state["importances"], dtype=np.float64)
        return model
