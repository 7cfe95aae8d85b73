"""Hyperparameter search: exhaustive grid, seeded random draws, and
successive halving over the iterative families' round/epoch budget."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SearchError
from .evaluation import cross_val_accuracy

# hyperparameter that acts as the training resource, per iterative family
RESOURCE_AXIS = {"gbt": "n_rounds", "ann": "epochs"}


@dataclass(frozen=True)
class SearchSpace:
    """Per-dimension value lists (grid) or samplers (random/halving).

    A dimension maps to either a list of discrete choices or a tuple
    ("uniform"|"loguniform"|"randint", low, high) sampled per draw.
    """

    dimensions: dict
    budget: int = 16
    seed: int = 0

    def __post_init__(self):
        if not self.dimensions:
            raise SearchError("search space has no dimensions")
        for name, spec in self.dimensions.items():
            if isinstance(spec, (list, tuple)) and len(spec) == 0:
                raise SearchError(f"dimension {name!r} is empty")
        if self.budget < 1:
            raise SearchError("budget must be >= 1")

    def grid(self) -> list[dict]:
        names = list(self.dimensions)
        for name in names:
            if not isinstance(self.dimensions[name], list):
                raise SearchError(f"grid search needs a value list for {name!r}")
        combos = itertools.product(*(self.dimensions[n] for n in names))
        return [dict(zip(names, values)) for values in combos]

    def sample(self, n: int) -> list[dict]:
        rng = np.random.default_rng(self.seed)
        configs = []
        for _ in range(n):
            config = {}
            for name, spec in self.dimensions.items():
                if isinstance(spec, list):
                    config[name] = spec[int(rng.integers(len(spec)))]
                else:
                    kind, lo, hi = spec
                    if kind == "uniform":
                        config[name] = float(rng.uniform(lo, hi))
                    elif kind == "loguniform":
                        config[name] = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
                    elif kind == "randint":
                        config[name] = int(rng.integers(lo, hi + 1))
                    else:
                        raise SearchError(f"unknown sampler {kind!r} for {name!r}")
            configs.append(config)
        return configs


@dataclass(frozen=True)
class SearchEntry:
    config_id: int
    params: dict
    mean_accuracy: float
    precision: float | None
    recall: float | None


@dataclass(frozen=True)
class SearchResult:
    best_params: dict
    best_score: float
    leaderboard: tuple[SearchEntry, ...]

    def leaderboard_csv(self) -> str:
        lines = ["config_id,params,mean_accuracy,precision,recall"]
        for e in self.leaderboard:
            params = json.dumps(e.params, sort_keys=True).replace('"', '""')
            precision = "" if e.precision is None else f"{e.precision:.6f}"
            recall = "" if e.recall is None else f"{e.recall:.6f}"
            lines.append(f'{e.config_id},"{params}",{e.mean_accuracy:.6f},{precision},{recall}')
        return "\n".join(lines) + "\n"


def _mean_defined(values):
    defined = [v for v in values if v is not None]
    return sum(defined) / len(defined) if defined else None


def _evaluate_configs(model, configs, X, y, k_folds, seed) -> list[SearchEntry]:
    entries = []
    for config_id, params in enumerate(configs):
        candidate = model.clone(**params)
        mean_acc, _, reports = cross_val_accuracy(candidate, X, y, k=k_folds, seed=seed)
        entries.append(
            SearchEntry(
                config_id=config_id,
                params=params,
                mean_accuracy=mean_acc,
                precision=_mean_defined([r.precision for r in reports]),
                recall=_mean_defined([r.recall for r in reports]),
            )
        )
    return entries


def _pick_best(entries) -> SearchEntry:
    best = entries[0]
    for entry in entries[1:]:
        if entry.mean_accuracy > best.mean_accuracy:
            best = entry
    return best


def grid_search(model, space: SearchSpace, X, y, k_folds=5, seed=0) -> SearchResult:
    configs = space.grid()
    entries = _evaluate_configs(model, configs, X, y, k_folds, seed)
    best = _pick_best(entries)
    return SearchResult(best.params, best.mean_accuracy, tuple(entries))


def random_search(model, space: SearchSpace, X, y, k_folds=5, seed=0) -> SearchResult:
    configs = space.sample(space.budget)
    entries = _evaluate_configs(model, configs, X, y, k_folds, seed)
    best = _pick_best(entries)
    return SearchResult(best.params, best.mean_accuracy, tuple(entries))


def successive_halving(model, space: SearchSpace, X, y, k_folds=5, seed=0) -> SearchResult:
    """Score `budget` sampled configs at a quarter of their training resource,
    keep the top half per rung, and double the resource until full.

    Families without a resource axis fall back to plain random search.
    """
    resource_key = RESOURCE_AXIS.get(model.family)
    if resource_key is None:
        return random_search(model, space, X, y, k_folds=k_folds, seed=seed)

    configs = space.sample(space.budget)
    full = {i: model.clone(**params).get_params()[resource_key] for i, params in enumerate(configs)}
    survivors = list(range(len(configs)))
    scored: dict[int, SearchEntry] = {}
    fraction = 0.25
    while True:
        rung_entries = []
        for i in survivors:
            resource = max(1, int(round(full[i] * fraction)))
            candidate = model.clone(**configs[i]).set_params(**{resource_key: resource})
            mean_acc, _, reports = cross_val_accuracy(candidate, X, y, k=k_folds, seed=seed)
            entry = SearchEntry(
                config_id=i,
                params=configs[i],
                mean_accuracy=mean_acc,
                precision=_mean_defined([r.precision for r in reports]),
                recall=_mean_defined([r.recall for r in reports]),
            )
            scored[i] = entry
            rung_entries.append(entry)
        if fraction >= 1.0 or len(survivors) == 1:
            break
        # stable sort: ties keep enumeration order
        rung_entries.sort(key=lambda e: -e.mean_accuracy)
        keep = max(1, len(survivors) // 2)
        survivors = sorted(e.config_id for e in rung_entries[:keep])
        fraction = min(1.0, fraction * 2.0)

    entries = tuple(scored[i] for i in sorted(scored))
    final = _pick_best([scored[i] for i in survivors])
    return SearchResult(final.params, final.mean_accuracy, entries)
