"""The model families behind one fit/predict_proba contract."""

from __future__ import annotations

from .ann import NeuralNetClassifier
from .base import BaseClassifier, check_array, check_X_y
from .bayes import NaiveBayesClassifier
from .forest import DecisionTreeClassifier, RandomForestClassifier
from .gbt import GradientBoostedTrees
from .linear import LogisticRegressionClassifier
from .neighbors import KNeighborsClassifier
from .svm import LinearSvmClassifier

FAMILIES: dict[str, type[BaseClassifier]] = {
    cls.family: cls
    for cls in (
        GradientBoostedTrees,
        NeuralNetClassifier,
        LogisticRegressionClassifier,
        NaiveBayesClassifier,
        KNeighborsClassifier,
        LinearSvmClassifier,
        RandomForestClassifier,
        DecisionTreeClassifier,
    )
}


def make_model(family: str, hyperparams: dict | None = None) -> BaseClassifier:
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown model family {family!r}; choose from {sorted(FAMILIES)}")
    return cls(**(hyperparams or {}))


def fit_model(family, X, y, hyperparams=None, feature_names=None) -> BaseClassifier:
    return make_model(family, hyperparams).fit(X, y, feature_names=feature_names)


def model_from_state(state: dict) -> BaseClassifier:
    return FAMILIES[state["family"]].from_state(state)


__all__ = [
    "BaseClassifier",
    "DecisionTreeClassifier",
    "FAMILIES",
    "GradientBoostedTrees",
    "KNeighborsClassifier",
    "LinearSvmClassifier",
    "LogisticRegressionClassifier",
    "NaiveBayesClassifier",
    "NeuralNetClassifier",
    "RandomForestClassifier",
    "check_array",
    "check_X_y",
    "fit_model",
    "make_model",
    "model_from_state",
]
