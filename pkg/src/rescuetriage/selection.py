"""Feature selection: recursive elimination with CV, and a correlation fallback."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SelectionError
from .evaluation import cross_val_accuracy


@dataclass(frozen=True)
class RfecvResult:
    selected: tuple[int, ...]           # column indices into the original matrix
    selected_names: tuple[str, ...]
    curve: tuple[tuple[int, float, float], ...]  # (size, mean_accuracy, stderr)

    def sizes(self) -> tuple[int, ...]:
        return tuple(size for size, _, _ in self.curve)


def rfecv(model, X, y, k_folds=5, step=1, seed=0, feature_names=None) -> RfecvResult:
    """Drop the `step` least-important features per round, score each size by
    k-fold CV accuracy, then pick the smallest size within one standard error
    of the best mean."""
    if not model.supports_importance:
        raise SelectionError(
            f"family {model.family!r} exposes no feature importances; "
            "use correlation_filter instead"
        )
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    d = X.shape[1]
    if d < 2:
        raise SelectionError("need at least 2 features to eliminate from")
    if step < 1:
        raise SelectionError("step must be >= 1")
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(d)]

    active = np.arange(d)
    curve = []
    subsets = {}
    while True:
        mean_acc, stderr, _ = cross_val_accuracy(model, X[:, active], y, k=k_folds, seed=seed)
        curve.append((active.size, mean_acc, stderr))
        subsets[active.size] = active.copy()
        if active.size == 1:
            break
        fitted = model.clone().fit(X[:, active], y)
        importance = fitted.feature_importance()
        drop = min(step, active.size - 1)
        # stable argsort keeps elimination deterministic on tied importances
        weakest = np.argsort(importance, kind="stable")[:drop]
        active = np.delete(active, weakest)

    best_mean, best_stderr = curve[0][1], curve[0][2]
    for _, mean_acc, stderr in curve[1:]:
        if mean_acc > best_mean or (mean_acc == best_mean and stderr < best_stderr):
            best_mean, best_stderr = mean_acc, stderr
    floor = best_mean - best_stderr
    chosen_size = min(size for size, mean_acc, _ in curve if mean_acc >= floor)
    selected = subsets[chosen_size]
    return RfecvResult(
        selected=tuple(int(i) for i in selected),
        selected_names=tuple(feature_names[i] for i in selected),
        curve=tuple(curve),
    )


def point_biserial(feature: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation between a feature column and binary labels."""
    feature = np.asarray(feature, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    fs = feature.std()
    ys = y.std()
    if fs == 0.0 or ys == 0.0:
        return 0.0
    return float(((feature - feature.mean()) * (y - y.mean())).mean() / (fs * ys))


def correlation_filter(X, y, threshold=0.05) -> tuple[int, ...]:
    """Keep features with |point-biserial r| >= threshold; never returns empty."""
    if not (0.0 < threshold < 1.0):
        raise SelectionError("threshold must be in (0, 1)")
    X = np.asarray(X, dtype=np.float64)
    r = np.array([abs(point_biserial(X[:, j], y)) for j in range(X.shape[1])])
    kept = np.flatnonzero(r >= threshold)
    if kept.size == 0:
        kept = np.array([int(np.argmax(r))])
    return tuple(int(i) for i in kept)
