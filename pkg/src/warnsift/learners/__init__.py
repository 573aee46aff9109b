"""From-scratch learners used for warning triage.

Three model kinds share one training entry point:

* ``linear_svm`` -- L2-regularized hinge loss with per-class cost weights,
  probabilities via a sigmoid fitted on training scores.
* ``decision_tree`` -- CART with Gini impurity.
* ``random_forest`` -- bagged CART trees with per-split feature subsampling.

All models expose ``score(X)`` (real-valued, sign-oriented: positive means
actionable) and ``predict_proba(X)`` (probability of the actionable class),
and serialize to plain JSON dicts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DegenerateTrainingError

KINDS = ("linear_svm", "decision_tree", "random_forest")
KIND_ALIASES = {
    "svm": "linear_svm",
    "linear_svm": "linear_svm",
    "dt": "decision_tree",
    "tree": "decision_tree",
    "decision_tree": "decision_tree",
    "rf": "random_forest",
    "forest": "random_forest",
    "random_forest": "random_forest",
}


@dataclass(frozen=True)
class TrainConfig:
    kind: str = "linear_svm"
    class_weighting: str = "balanced"  # "balanced" | "none"
    seed: int = 0
    # linear_svm
    C: float = 1.0
    max_epochs: int = 400
    tolerance: float = 1e-5
    # decision_tree
    min_samples_leaf: int = 1
    max_depth: int | None = None
    # random_forest
    n_trees: int = 100
    bootstrap: bool = True
    features_per_split: str | int = "sqrt"  # "sqrt" | "all" | positive int

    def validated(self) -> "TrainConfig":
        if self.kind not in KINDS:
            raise ValueError(f"unknown learner kind '{self.kind}'")
        if self.class_weighting not in ("balanced", "none"):
            raise ValueError(f"unknown class weighting '{self.class_weighting}'")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be at least 1 when set")
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("sqrt", "all"):
                raise ValueError("features_per_split must be 'sqrt', 'all', or an int")
        elif self.features_per_split < 1:
            raise ValueError("features_per_split must be at least 1")
        return self

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "class_weighting": self.class_weighting,
            "seed": self.seed,
            "C": self.C,
            "max_epochs": self.max_epochs,
            "tolerance": self.tolerance,
            "min_samples_leaf": self.min_samples_leaf,
            "max_depth": self.max_depth,
            "n_trees": self.n_trees,
            "bootstrap": self.bootstrap,
            "features_per_split": self.features_per_split,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrainConfig":
        return cls(**doc).validated()


def default_config(kind: str, **overrides) -> TrainConfig:
    """Per-kind defaults: the SVM uses balanced class weights, trees and
    forests run unweighted unless asked otherwise."""
    canonical = KIND_ALIASES.get(kind)
    if canonical is None:
        raise ValueError(f"unknown learner kind '{kind}'")
    weighting = "balanced" if canonical == "linear_svm" else "none"
    cfg = TrainConfig(kind=canonical, class_weighting=weighting)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validated()


def class_weights(y: np.ndarray, mode: str) -> np.ndarray:
    """Per-sample cost weights. 'balanced' scales each class by n/(2*n_class)
    so both classes contribute equally; 'none' gives every sample weight 1."""
    if mode == "none":
        return np.ones(len(y), dtype=np.float64)
    n = len(y)
    n_pos = int(np.sum(y > 0))
    n_neg = n - n_pos
    w = np.empty(n, dtype=np.float64)
    w[y > 0] = n / (2.0 * n_pos)
    w[y < 0] = n / (2.0 * n_neg)
    return w


def _check_training_inputs(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D array")
    if y.ndim != 1 or len(y) != len(X):
        raise ValueError("y must be 1-D and row-aligned with X")
    if len(y) == 0:
        raise ValueError("cannot train on an empty set")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if not np.all(np.isin(y, (-1, 1))):
        raise ValueError("y must contain only +1 and -1")
    y = y.astype(np.int8)
    if not ((y > 0).any() and (y < 0).any()):
        raise DegenerateTrainingError("training set contains a single class")
    return X, y


def train(X, y, cfg: TrainConfig, warm_from=None, schema_hash: str | None = None):
    """Fit a model of cfg.kind. Raises DegenerateTrainingError when y holds a
    single class. warm_from (same-kind model) is a speed hint for the SVM."""
    from .forest import fit_random_forest
    from .svm import fit_linear_svm
    from .tree import fit_decision_tree

    cfg = cfg.validated()
    X, y = _check_training_inputs(X, y)
    if cfg.kind == "linear_svm":
        warm = warm_from if getattr(warm_from, "kind", None) == "linear_svm" else None
        return fit_linear_svm(X, y, cfg, warm=warm, schema_hash=schema_hash)
    if cfg.kind == "decision_tree":
        return fit_decision_tree(X, y, cfg, schema_hash=schema_hash)
    return fit_random_forest(X, y, cfg, schema_hash=schema_hash)


def model_to_json(model) -> dict:
    return model.to_json()


def model_from_json(doc: dict):
    from .forest import RandomForest
    from .svm import LinearSVM
    from .tree import DecisionTree

    kind = doc.get("kind")
    if kind == "linear_svm":
        return LinearSVM.from_json(doc)
    if kind == "decision_tree":
        return DecisionTree.from_json(doc)
    if kind == "random_forest":
        return RandomForest.from_json(doc)
    raise ValueError(f"unknown model kind '{kind}'")
