"""Histogram-binned decision trees shared by the tree-based families.

Features are quantized once per fit (exact midpoints when a column has few
distinct values, quantile cuts otherwise); split search then works on per-bin
statistics, which keeps growing a tree O(rows * features) per level. Split
ties resolve to the lowest feature index, then the lowest threshold, so fits
are bit-reproducible.
"""

from __future__ import annotations

import numpy as np

MAX_BINS = 256
_MIN_GAIN = 1e-12


def bin_features(X, max_bins=MAX_BINS):
    """Quantize columns; returns (per-feature thresholds, integer codes).

    Codes satisfy: value <= thresholds[f][b]  <=>  code <= b, which is the
    comparison predict uses on raw values.
    """
    n, d = X.shape
    thresholds = []
    codes = np.empty((n, d), dtype=np.int32)
    for f in range(d):
        col = X[:, f]
        uniq = np.unique(col)
        if uniq.size <= 1:
            cuts = np.empty(0, dtype=np.float64)
        elif uniq.size <= max_bins:
            cuts = (uniq[:-1] + uniq[1:]) / 2.0
        else:
            qs = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            cuts = np.unique(qs)
        codes[:, f] = np.searchsorted(cuts, col, side="left")
        thresholds.append(cuts)
    return thresholds, codes


class FlatTree:
    """Array-of-nodes tree; feature < 0 marks a leaf."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=np.float64)

    def predict_value(self, X) -> np.ndarray:
        n = X.shape[0]
        if n <= 4:
            # scalar walk beats vectorized gather at request-sized batches
            feature, threshold = self.feature, self.threshold
            left, right, value = self.left, self.right, self.value
            out = np.empty(n)
            for i in range(n):
                row = X[i]
                node = 0
                while feature[node] >= 0:
                    node = left[node] if row[feature[node]] <= threshold[node] else right[node]
                out[i] = value[node]
            return out
        idx = np.zeros(n, dtype=np.int32)
        while True:
            feat = self.feature[idx]
            internal = feat >= 0
            if not internal.any():
                return self.value[idx]
            xv = X[np.arange(n), np.maximum(feat, 0)]
            go_left = xv <= self.threshold[idx]
            nxt = np.where(go_left, self.left[idx], self.right[idx])
            idx = np.where(internal, nxt, idx)

    def to_state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "FlatTree":
        return cls(
            state["feature"], state["threshold"], state["left"], state["right"], state["value"]
        )


class _TreeBuilder:
    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def add_leaf(self, value) -> int:
        node = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        return node

    def add_split(self, feature, threshold) -> int:
        node = len(self.feature)
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return node

    def build(self) -> FlatTree:
        return FlatTree(self.feature, self.threshold, self.left, self.right, self.value)


def _node_histograms(offset_codes, rows, w1, w2, d, stride):
    """Per-bin sums of two row-weight vectors over the node's rows."""
    sel = offset_codes[rows].ravel()
    h1 = np.bincount(sel, weights=np.repeat(w1[rows], d), minlength=d * stride)
    h2 = np.bincount(sel, weights=np.repeat(w2[rows], d), minlength=d * stride)
    return h1.reshape(d, stride), h2.reshape(d, stride)


def _valid_cut_mask(thresholds, stride):
    d = len(thresholds)
    mask = np.zeros((d, stride - 1), dtype=bool)
    for f, cuts in enumerate(thresholds):
        mask[f, : cuts.size] = True
    return mask


def grow_gradient_tree(
    codes,
    thresholds,
    rows,
    grad,
    hess,
    max_depth,
    reg_lambda,
    min_child_weight,
    learning_rate,
    gain_accumulator,
):
    """Second-order boosting tree: leaf weight -G/(H+lambda), split by max gain."""
    n, d = codes.shape
    stride = MAX_BINS
    offset_codes = codes + (np.arange(d, dtype=np.int32) * stride)[None, :]
    cut_mask = _valid_cut_mask(thresholds, stride)
    builder = _TreeBuilder()

    def objective(g, h):
        return (g * g) / (h + reg_lambda)

    def grow(rows, depth) -> int:
        hg, hh = _node_histograms(offset_codes, rows, grad, hess, d, stride)
        g_total = hg[0].sum()
        h_total = hh[0].sum()
        denom = h_total + reg_lambda
        leaf_value = learning_rate * (-g_total / denom) if denom > 0.0 else 0.0
        if depth >= max_depth or rows.size < 2:
            return builder.add_leaf(leaf_value)

        gl = np.cumsum(hg, axis=1)[:, :-1]
        hl = np.cumsum(hh, axis=1)[:, :-1]
        gr = g_total - gl
        hr = h_total - hl
        feasible = cut_mask & (hl >= min_child_weight) & (hr >= min_child_weight)
        with np.errstate(invalid="ignore"):
            gain = 0.5 * (
                objective(gl, hl) + objective(gr, hr) - objective(g_total, h_total)
            )
        gain[~feasible] = -np.inf
        flat_best = int(np.argmax(gain))
        best_gain = gain.ravel()[flat_best]
        if not np.isfinite(best_gain) or best_gain <= _MIN_GAIN:
            return builder.add_leaf(leaf_value)

        feat, cut = divmod(flat_best, stride - 1)
        if gain_accumulator is not None:
            gain_accumulator[feat] += best_gain
        node = builder.add_split(feat, thresholds[feat][cut])
        go_left = codes[rows, feat] <= cut
        builder.left[node] = grow(rows[go_left], depth + 1)
        builder.right[node] = grow(rows[~go_left], depth + 1)
        return node

    grow(np.asarray(rows, dtype=np.int64), 0)
    return builder.build()


def grow_gini_tree(
    codes,
    thresholds,
    rows,
    y,
    max_depth,
    min_samples_leaf,
    max_features=None,
    rng=None,
    gain_accumulator=None,
):
    """CART-style tree on Gini impurity; leaf value = positive fraction."""
    n, d = codes.shape
    stride = MAX_BINS
    offset_codes = codes + (np.arange(d, dtype=np.int32) * stride)[None, :]
    cut_mask = _valid_cut_mask(thresholds, stride)
    ones = np.ones(n, dtype=np.float64)
    builder = _TreeBuilder()

    def grow(rows, depth) -> int:
        hp, hc = _node_histograms(offset_codes, rows, y, ones, d, stride)
        pos = hp[0].sum()
        count = hc[0].sum()
        leaf_value = pos / count
        if depth >= max_depth or count < 2 * min_samples_leaf or pos in (0.0, count):
            return builder.add_leaf(leaf_value)

        pl = np.cumsum(hp, axis=1)[:, :-1]
        cl = np.cumsum(hc, axis=1)[:, :-1]
        pr = pos - pl
        cr = count - cl
        feasible = cut_mask & (cl >= min_samples_leaf) & (cr >= min_samples_leaf)
        if max_features is not None and max_features < d:
            allowed = rng.choice(d, size=max_features, replace=False)
            column_ok = np.zeros(d, dtype=bool)
            column_ok[allowed] = True
            feasible = feasible & column_ok[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            # impurity decrease, scaled by node fraction of the root
            gini_parent = 1.0 - (pos / count) ** 2 - (1.0 - pos / count) ** 2
            gini_left = 1.0 - (pl / cl) ** 2 - (1.0 - pl / cl) ** 2
            gini_right = 1.0 - (pr / cr) ** 2 - (1.0 - pr / cr) ** 2
            gain = gini_parent - (cl / count) * gini_left - (cr / count) * gini_right
        gain[~feasible] = -np.inf
        flat_best = int(np.argmax(gain))
        best_gain = gain.ravel()[flat_best]
        if not np.isfinite(best_gain) or best_gain <= _MIN_GAIN:
            return builder.add_leaf(leaf_value)

        feat, cut = divmod(flat_best, stride - 1)
        if gain_accumulator is not None:
            gain_accumulator[feat] += best_gain * (count / n)
        node = builder.add_split(feat, thresholds[feat][cut])
        go_left = codes[rows, feat] <= cut
        builder.left[node] = grow(rows[go_left], depth + 1)
        builder.right[node] = grow(rows[~go_left], depth + 1)
        return node

    grow(np.asarray(rows, dtype=np.int64), 0)
    return builder.build()
