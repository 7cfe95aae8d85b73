"""End-to-end training: selection, tuning, final fits, metrics, bundles.

One run produces six bundles (one per complication), each holding the fitted
boosted-tree and neural-net pair plus the transform state (repair rules,
scaler, selected features) the prediction engine re-applies per request.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bundle import ComplicationBundle, RepairRule, bundle_filename, save_bundle, write_manifest
from .errors import SelectionError
from .evaluation import MetricsReport, evaluate, train_test_split
from .learners import GradientBoostedTrees, NeuralNetClassifier
from .preprocess import IqrBounds, Scaler, iqr_bounds
from .records import COMPLICATIONS, REPAIRABLE_VITALS, VITAL_NAMES, Complication, LabeledDataset
from .selection import rfecv
from .tuning import SearchSpace, grid_search, random_search, successive_halving

TUNING_STRATEGIES = ("none", "grid", "random", "halving")


@dataclass
class TrainOptions:
    tuning: str = "none"
    folds: int = 5                 # CV folds for hyperparameter search
    rfecv_folds: int = 3
    rfecv_step: int = 3
    tuning_budget: int = 8
    test_fraction: float = 0.2
    seed: int = 0
    gbt_params: dict = field(default_factory=dict)
    ann_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tuning not in TUNING_STRATEGIES:
            raise ValueError(f"tuning must be one of {TUNING_STRATEGIES}")


# reduced model used only to rank features inside RFECV
PROBE_GBT_PARAMS = {"n_rounds": 40, "max_depth": 3, "learning_rate": 0.3}

GBT_GRID = {"max_depth": [3, 4], "learning_rate": [0.1, 0.3]}
GBT_SAMPLED = {
    "max_depth": [3, 4, 5],
    "learning_rate": ("loguniform", 0.05, 0.3),
    "n_rounds": [100, 200],
}
ANN_GRID = {"learning_rate": [1e-3, 3e-3], "hidden_sizes": [[32, 16], [16, 8]]}
ANN_SAMPLED = {
    "learning_rate": ("loguniform", 5e-4, 5e-3),
    "hidden_sizes": [[32, 16], [16, 8], [48, 24]],
}


@dataclass
class ComplicationSummary:
    complication: Complication
    selected_features: tuple[str, ...]
    gbt_metrics: MetricsReport
    ann_metrics: MetricsReport
    gbt_params: dict
    ann_params: dict


@dataclass
class TrainReport:
    fingerprint: str
    summaries: dict[Complication, ComplicationSummary]
    out_dir: Path | None = None


def make_fingerprint(source: str, options: TrainOptions) -> str:
    payload = json.dumps(
        {
            "source": source,
            "tuning": options.tuning,
            "folds": options.folds,
            "rfecv_folds": options.rfecv_folds,
            "rfecv_step": options.rfecv_step,
            "tuning_budget": options.tuning_budget,
            "test_fraction": options.test_fraction,
            "seed": options.seed,
        },
        sort_keys=True,
    )
    return f"{source}#{hashlib.sha256(payload.encode()).hexdigest()[:16]}"


def fit_repair_rules(X_train: np.ndarray, feature_names) -> dict[str, RepairRule]:
    """Training-column IQR fences for the continuous vitals; zero-IQR skipped."""
    rules: dict[str, RepairRule] = {}
    for name in REPAIRABLE_VITALS:
        idx = feature_names.index(name)
        column = X_train[:, idx]
        bounds = iqr_bounds(column)
        if bounds.upper == bounds.lower:
            continue
        inside = column[(column >= bounds.lower) & (column <= bounds.upper)]
        rules[name] = RepairRule(bounds=bounds, replacement=float(inside.mean()))
    return rules


def apply_repair_rules(X: np.ndarray, feature_names, rules: dict[str, RepairRule]) -> np.ndarray:
    out = X.copy()
    for name, rule in rules.items():
        idx = feature_names.index(name)
        column = out[:, idx]
        outside = (column < rule.bounds.lower) | (column > rule.bounds.upper)
        column[outside] = rule.replacement
    return out


def transform_features(bundle_like, X: np.ndarray, feature_names) -> np.ndarray:
    """Repair -> select -> scale, exactly as the engine does per record."""
    repaired = apply_repair_rules(X, feature_names, bundle_like.repair_rules)
    name_to_col = {name: i for i, name in enumerate(feature_names)}
    selected = np.column_stack(
        [
            repaired[:, name_to_col[name]]
            if name in name_to_col
            else np.zeros(X.shape[0])
            for name in bundle_like.selected_features
        ]
    )
    return bundle_like.scaler.transform(selected)


def _tune(model, sampled_space, grid_space, X, y, options: TrainOptions) -> dict:
    if options.tuning == "grid":
        space = SearchSpace(dimensions=grid_space, budget=options.tuning_budget, seed=options.seed)
        return grid_search(model, space, X, y, k_folds=options.folds, seed=options.seed).best_params
    space = SearchSpace(dimensions=sampled_space, budget=options.tuning_budget, seed=options.seed)
    if options.tuning == "random":
        return random_search(model, space, X, y, k_folds=options.folds, seed=options.seed).best_params
    return successive_halving(model, space, X, y, k_folds=options.folds, seed=options.seed).best_params


def train_complication(
    complication: Complication,
    X: np.ndarray,
    y: np.ndarray,
    feature_names: list[str],
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    options: TrainOptions,
    fingerprint: str,
) -> tuple[ComplicationBundle, ComplicationSummary]:
    X_train_raw, y_train = X[train_idx], y[train_idx]
    X_test_raw, y_test = X[test_idx], y[test_idx]

    rules = fit_repair_rules(X_train_raw, feature_names)
    X_train = apply_repair_rules(X_train_raw, feature_names, rules)
    X_test = apply_repair_rules(X_test_raw, feature_names, rules)

    probe = GradientBoostedTrees(seed=options.seed, **PROBE_GBT_PARAMS)
    try:
        selection = rfecv(
            probe,
            X_train,
            y_train,
            k_folds=options.rfecv_folds,
            step=options.rfecv_step,
            seed=options.seed,
            feature_names=feature_names,
        )
        selected_names = selection.selected_names
        selected_idx = list(selection.selected)
    except SelectionError:
        selected_names = tuple(feature_names)
        selected_idx = list(range(len(feature_names)))

    scale_positions = [i for i, name in enumerate(selected_names) if name in VITAL_NAMES]
    scaler = Scaler(scale_columns=scale_positions).fit(X_train[:, selected_idx])
    Xs_train = scaler.transform(X_train[:, selected_idx])
    Xs_test = scaler.transform(X_test[:, selected_idx])

    gbt_params = dict(options.gbt_params)
    ann_params = dict(options.ann_params)
    gbt_params.setdefault("seed", options.seed)
    ann_params.setdefault("seed", options.seed)
    if options.tuning != "none":
        gbt_params.update(
            _tune(GradientBoostedTrees(**gbt_params), GBT_SAMPLED, GBT_GRID, Xs_train, y_train, options)
        )
        ann_params.update(
            _tune(NeuralNetClassifier(**ann_params), ANN_SAMPLED, ANN_GRID, Xs_train, y_train, options)
        )

    gbt = GradientBoostedTrees(**gbt_params).fit(Xs_train, y_train, feature_names=selected_names)
    ann = NeuralNetClassifier(**ann_params).fit(Xs_train, y_train, feature_names=selected_names)

    gbt_metrics = evaluate(y_test, gbt.predict_proba(Xs_test))
    ann_metrics = evaluate(y_test, ann.predict_proba(Xs_test))

    bundle = ComplicationBundle(
        complication=complication,
        gbt=gbt,
        ann=ann,
        scaler=scaler,
        repair_rules=rules,
        selected_features=selected_names,
        training_fingerprint=fingerprint,
    )
    summary = ComplicationSummary(
        complication=complication,
        selected_features=selected_names,
        gbt_metrics=gbt_metrics,
        ann_metrics=ann_metrics,
        gbt_params=gbt_params,
        ann_params=ann_params,
    )
    return bundle, summary


def train_all(
    dataset: LabeledDataset,
    options: TrainOptions,
    source: str,
    out_dir=None,
) -> TrainReport:
    X = dataset.feature_matrix()
    feature_names = list(dataset.feature_names)
    fingerprint = make_fingerprint(source, options)
    train_idx, test_idx = train_test_split(
        len(dataset), test_fraction=options.test_fraction, seed=options.seed
    )

    summaries: dict[Complication, ComplicationSummary] = {}
    bundles: dict[Complication, ComplicationBundle] = {}
    for comp in COMPLICATIONS:
        y = dataset.label_vector(comp)
        bundle, summary = train_complication(
            comp, X, y, feature_names, train_idx, test_idx, options, fingerprint
        )
        bundles[comp] = bundle
        summaries[comp] = summary

    if out_dir is not None:
        out_dir = Path(out_dir)
        for comp, bundle in bundles.items():
            save_bundle(bundle, out_dir / bundle_filename(comp))
        write_manifest(out_dir)

    return TrainReport(fingerprint=fingerprint, summaries=summaries, out_dir=out_dir)


def metrics_table(summaries: dict[Complication, ComplicationSummary], family: str) -> str:
    """Render one family's held-out metrics in the three-column report shape."""
    rows = [f"{family.upper()} held-out metrics"]
    rows.append(f"{'Complication':<16}{'Precision':>11}{'Accuracy':>11}{'Recall':>9}")
    for comp in COMPLICATIONS:
        summary = summaries[comp]
        report = summary.gbt_metrics if family == "gbt" else summary.ann_metrics
        precision = "n/a" if report.precision is None else f"{100 * report.precision:.2f}%"
        recall = "n/a" if report.recall is None else f"{100 * report.recall:.2f}%"
        rows.append(
            f"{comp.value.capitalize():<16}{precision:>11}{100 * report.accuracy:>10.2f}%{recall:>9}"
        )
    return "\n".join(rows)
