"""Gradient-boosted trees on logistic loss with second-order leaf weights.

Each round fits one tree to the current gradient/hessian of the logistic
loss; leaf weights are -sum(g)/(sum(h)+lambda) scaled by the learning rate,
splits maximize the corresponding gain. The initial score defaults to the
log-odds of the training base rate and can be pinned explicitly.
"""

from __future__ import annotations

import numpy as np

from .base import BaseClassifier, check_X_y
from .tree import FlatTree, bin_features, grow_gradient_tree


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logloss(scores, y):
    # mean(softplus(F) - y*F), stable for large |F|
    return float(np.mean(np.logaddexp(0.0, scores) - y * scores))


class GradientBoostedTrees(BaseClassifier):
    family = "gbt"
    supports_importance = True

    def __init__(
        self,
        n_rounds=200,
        learning_rate=0.1,
        max_depth=4,
        reg_lambda=1.0,
        min_child_weight=1.0,
        subsample=1.0,
        base_score=None,
        max_bins=256,
        seed=0,
    ):
        if n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if not (0.0 < learning_rate <= 1.0):
            raise ValueError("learning_rate must be in (0, 1]")
        if reg_lambda < 0.0:
            raise ValueError("reg_lambda must be >= 0")
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.min_child_weight = min_child_weight
        self.subsample = subsample
        self.base_score = base_score
        self.max_bins = max_bins
        self.seed = seed

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y)
        self._set_fit_meta(X, feature_names)
        n, d = X.shape
        rng = np.random.default_rng(self.seed)

        if self.base_score is None:
            rate = y.mean()
            self.base_score_ = float(np.log(rate / (1.0 - rate)))
        else:
            self.base_score_ = float(self.base_score)

        thresholds, codes = bin_features(X, self.max_bins)
        gain_per_feature = np.zeros(d)
        scores = np.full(n, self.base_score_)
        self.trees_ = []
        self.train_loss_ = [_logloss(scores, y)]
        all_rows = np.arange(n)
        sample_size = max(1, int(round(self.subsample * n)))

        for _ in range(self.n_rounds):
            p = _sigmoid(scores)
            grad = p - y
            hess = p * (1.0 - p)
            rows = (
                all_rows
                if sample_size >= n
                else np.sort(rng.choice(n, size=sample_size, replace=False))
            )
            tree = grow_gradient_tree(
                codes,
                thresholds,
                rows,
                grad,
                hess,
                self.max_depth,
                self.reg_lambda,
                self.min_child_weight,
                self.learning_rate,
                gain_per_feature,
            )
            self.trees_.append(tree)
            scores = scores + tree.predict_value(X)
            self.train_loss_.append(_logloss(scores, y))

        total = gain_per_feature.sum()
        self.importances_ = gain_per_feature / total if total > 0 else np.zeros(d)
        return self

    def decision_scores(self, X) -> np.ndarray:
        X = self._check_width(X)
        scores = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            scores += tree.predict_value(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_scores(X))

    def feature_importance(self):
        self._check_fitted()
        return self.importances_.copy()

    def to_state(self) -> dict:
        self._check_fitted()
        return {
            "family": self.family,
            "hyperparameters": self.get_params(),
            "feature_names": list(self.feature_names_),
            "base_score": self.base_score_,
            "trees": [t.to_state() for t in self.trees_],
            "importances": self.importances_.tolist(),
            "train_loss": list(self.train_loss_),
        }

    @classmethod
    def from_state(cls, state: dict) -> "GradientBoostedTrees":
        model = cls(**state["hyperparameters"])
        model.feature_names_ = tuple(state["feature_names"])
        model.n_features_ = len(model.feature_names_)
        model.base_score_ = state["base_score"]
        model.trees_ = [FlatTree.from_state(t) for t in state["trees"]]
        model.importances_ = np.asarray(state["importances"], dtype=np.float64)
        model.train_loss_ = list(state["train_loss"])
        return model
