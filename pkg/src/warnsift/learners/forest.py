"""Random forest: bagged CART trees with per-split feature subsampling.

Per-tree randomness comes from independent generators spawned off the config
seed with SeedSequence, so results are reproducible and order-independent.
Scores and probabilities are plain means over the trees. With n_trees=1,
bootstrap off, and feature subsampling off, the forest is exactly the single
CART tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import TrainConfig
from .tree import TreeNodes, apply_nodes, build_nodes


def resolve_max_features(rule: str | int, n_features: int) -> int:
    if rule == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if rule == "all":
        return n_features
    return min(int(rule), n_features)


@dataclass
class RandomForest:
    kind = "random_forest"

    trees: list[TreeNodes]
    config: TrainConfig
    schema_hash: str | None = None

    def _leaf_stats(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pos = np.empty((len(self.trees), len(X)), dtype=np.float64)
        tot = np.empty_like(pos)
        for t, nodes in enumerate(self.trees):
            leaves = apply_nodes(nodes, X)
            pos[t] = nodes.pos_count[leaves]
            tot[t] = nodes.total_count[leaves]
        return pos, tot

    def score(self, X: np.ndarray) -> np.ndarray:
        pos, tot = self._leaf_stats(X)
        return (2.0 * pos / tot - 1.0).mean(axis=0)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        pos, tot = self._leaf_stats(X)
        return ((pos + 1.0) / (tot + 2.0)).mean(axis=0)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_json(),
            "schema_hash": self.schema_hash,
            "parameters": {"trees": [t.to_json() for t in self.trees]},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RandomForest":
        return cls(
            trees=[TreeNodes.from_json(t) for t in doc["parameters"]["trees"]],
            config=TrainConfig.from_json(doc["config"]),
            schema_hash=doc.get("schema_hash"),
        )


def fit_random_forest(
    X: np.ndarray, y: np.ndarray, cfg: TrainConfig, schema_hash: str | None = None
) -> RandomForest:
    n, d = X.shape
    max_features = resolve_max_features(cfg.features_per_split, d)
    trees: list[TreeNodes] = []
    for child_seed in np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees):
        rng = np.random.default_rng(child_seed)
        idx = rng.integers(0, n, size=n) if cfg.bootstrap else np.arange(n)
        trees.append(build_nodes(X, y, idx, cfg, rng, max_features))
    return RandomForest(trees=trees, config=cfg, schema_hash=schema_hash)
