"""Cross-validation splits and the three report metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, SplitError


@dataclass(frozen=True)
class MetricsReport:
    """Confusion counts at a probability threshold; precision/recall may be
    undefined (None) when their denominator is zero."""

    tp: int
    fp: int
    fn: int
    tn: int
    threshold: float = 0.5

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    @property
    def precision(self) -> float | None:
        denom = self.tp + self.fp
        return self.tp / denom if denom else None

    @property
    def recall(self) -> float | None:
        denom = self.tp + self.fn
        return self.tp / denom if denom else None


def evaluate(y_true, y_prob, threshold=0.5) -> MetricsReport:
    """Confusion matrix with prob >= threshold counted as a positive call."""
    y_true = np.asarray(y_true)
    y_prob = np.asarray(y_prob, dtype=np.float64)
    if y_true.size == 0:
        raise EvaluationError("cannot evaluate empty inputs")
    if y_true.shape != y_prob.shape:
        raise EvaluationError(f"length mismatch: {y_true.shape} vs {y_prob.shape}")
    if ((y_prob < 0.0) | (y_prob > 1.0)).any():
        raise EvaluationError("probabilities must lie in [0, 1]")
    predicted = y_prob >= threshold
    actual = y_true == 1
    return MetricsReport(
        tp=int((predicted & actual).sum()),
        fp=int((predicted & ~actual).sum()),
        fn=int((~predicted & actual).sum()),
        tn=int((~predicted & ~actual).sum()),
        threshold=threshold,
    )


def kfold_split(n, k, seed=0, labels=None) -> list[np.ndarray]:
    """k disjoint index folds covering [0, n); stratified when labels given.

    Indices are shuffled once, then dealt round-robin, so fold sizes differ by
    at most one and, with labels, each class spreads evenly across folds.
    """
    if k < 2:
        raise SplitError("k must be >= 2")
    if k > n:
        raise SplitError(f"k={k} exceeds n={n}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    if labels is None:
        groups = [np.arange(n)]
    else:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise SplitError("labels length must equal n")
        groups = [np.flatnonzero(labels == v) for v in np.unique(labels)]
    for group in groups:
        for idx in rng.permutation(group):
            folds[cursor % k].append(int(idx))
            cursor += 1
    return [np.sort(np.asarray(fold, dtype=np.int64)) for fold in folds]


def train_test_split(n, test_fraction=0.2, seed=0, labels=None):
    """Deterministic stratified holdout split; returns (train_idx, test_idx)."""
    if not (0.0 < test_fraction < 1.0):
        raise SplitError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    if labels is None:
        groups = [np.arange(n)]
    else:
        labels = np.asarray(labels)
        groups = [np.flatnonzero(labels == v) for v in np.unique(labels)]
    test_parts = []
    for group in groups:
        shuffled = rng.permutation(group)
        take = int(round(test_fraction * group.size))
        test_parts.append(shuffled[:take])
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.empty(0, np.int64)
    train_idx = np.setdiff1d(np.arange(n), test_idx)
    return train_idx, test_idx.astype(np.int64)


def cross_val_accuracy(model, X, y, k=5, seed=0) -> tuple[float, float, list[MetricsReport]]:
    """Mean fold accuracy, its standard error, and per-fold reports."""
    folds = kfold_split(len(y), k, seed=seed, labels=y)
    reports = []
    for fold in folds:
        mask = np.ones(len(y), dtype=bool)
        mask[fold] = False
        fitted = model.clone().fit(X[mask], y[mask])
        reports.append(evaluate(y[fold], fitted.predict_proba(X[fold])))
    accs = np.array([r.accuracy for r in reports])
    stderr = float(accs.std(ddof=1) / np.sqrt(k)) if k > 1 else 0.0
    return float(accs.mean()), stderr, reports
