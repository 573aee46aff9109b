"""CART decision tree with Gini impurity.

Nodes are grown until pure, until a split cannot leave min_samples_leaf rows
on each side, or until max_depth. Candidate thresholds are midpoints between
consecutive distinct sorted values; the best split minimizes the weighted Gini
cost, with ties broken by lowest feature index and then lowest threshold.

A leaf's raw positive fraction p gives score = 2p - 1; predict_proba applies
Laplace smoothing (pos + 1) / (total + 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import TrainConfig, class_weights


@dataclass
class TreeNodes:
    """Flat array representation: feature == -1 marks a leaf."""

    feature: np.ndarray  # int32
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    pos_count: np.ndarray  # int64, positives reaching the node
    total_count: np.ndarray  # int64

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "pos_count": self.pos_count.tolist(),
            "total_count": self.total_count.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TreeNodes":
        return cls(
            feature=np.asarray(doc["feature"], dtype=np.int32),
            threshold=np.asarray(doc["threshold"], dtype=np.float64),
            left=np.asarray(doc["left"], dtype=np.int32),
            right=np.asarray(doc["right"], dtype=np.int32),
            pos_count=np.asarray(doc["pos_count"], dtype=np.int64),
            total_count=np.asarray(doc["total_count"], dtype=np.int64),
        )


def gini_split_cost(
    pos_left: float, tot_left: float, pos_right: float, tot_right: float
) -> float:
    """Size-weighted Gini impurity of a two-way split, normalized by the
    parent size. Used directly by the exhaustive oracle in the tests."""
    total = tot_left + tot_right
    g_left = 2.0 * pos_left * (tot_left - pos_left) / tot_left if tot_left > 0 else 0.0
    g_right = 2.0 * pos_right * (tot_right - pos_right) / tot_right if tot_right > 0 else 0.0
    return (g_left + g_right) / total


def build_nodes(
    X: np.ndarray,
    y: np.ndarray,
    root_idx: np.ndarray,
    cfg: TrainConfig,
    rng: np.random.Generator,
    max_features: int,
) -> TreeNodes:
    n_features = X.shape[1]
    weights = class_weights(y, cfg.class_weighting)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    pos_count: list[int] = []
    total_count: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        pos_count.append(0)
        total_count.append(0)
        return len(feature) - 1

    stack: list[tuple[np.ndarray, int, int]] = [(root_idx, 0, new_node())]
    while stack:
        idx, depth, slot = stack.pop()
        yy = y[idx]
        ww = weights[idx]
        n_pos = int(np.sum(yy > 0))
        n_tot = len(idx)
        pos_count[slot] = n_pos
        total_count[slot] = n_tot
        if (
            n_pos == 0
            or n_pos == n_tot
            or n_tot < 2 * cfg.min_samples_leaf
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            continue

        if max_features < n_features:
            candidates = np.sort(rng.choice(n_features, size=max_features, replace=False))
        else:
            candidates = np.arange(n_features)

        w_pos_total = float(ww[yy > 0].sum())
        w_total = float(ww.sum())
        best_cost = np.inf
        best_feature = -1
        best_threshold = 0.0
        for f in candidates:
            vals = X[idx, f]
            order = np.argsort(vals, kind="stable")
            vs = vals[order]
            if vs[0] == vs[-1]:
                continue
            ys = yy[order]
            ws = ww[order]
            w_pos_pre = np.cumsum(ws * (ys > 0))
            w_tot_pre = np.cumsum(ws)
            cut = np.nonzero(vs[:-1] < vs[1:])[0]  # split between cut and cut+1
            if cfg.min_samples_leaf > 1:
                cut = cut[
                    (cut + 1 >= cfg.min_samples_leaf)
                    & (n_tot - cut - 1 >= cfg.min_samples_leaf)
                ]
            if cut.size == 0:
                continue
            wl = w_tot_pre[cut]
            pl = w_pos_pre[cut]
            wr = w_total - wl
            pr = w_pos_total - pl
            cost = 2.0 * (pl * (wl - pl) / wl + pr * (wr - pr) / wr) / w_total
            j = int(np.argmin(cost))  # first minimum -> lowest threshold
            if cost[j] < best_cost:
                best_cost = float(cost[j])
                best_feature = int(f)
                best_threshold = 0.5 * (vs[cut[j]] + vs[cut[j] + 1])
        if best_feature < 0:
            continue  # no usable split (constant features); stays a leaf

        goes_left = X[idx, best_feature] < best_threshold
        feature[slot] = best_feature
        threshold[slot] = best_threshold
        left_slot = new_node()
        right_slot = new_node()
        left[slot] = left_slot
        right[slot] = right_slot
        stack.append((idx[~goes_left], depth + 1, right_slot))
        stack.append((idx[goes_left], depth + 1, left_slot))

    return TreeNodes(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        pos_count=np.asarray(pos_count, dtype=np.int64),
        total_count=np.asarray(total_count, dtype=np.int64),
    )


def apply_nodes(nodes: TreeNodes, X: np.ndarray) -> np.ndarray:
    """Leaf slot for every row, via level-wise vectorized descent."""
    X = np.asarray(X, dtype=np.float64)
    current = np.zeros(len(X), dtype=np.int64)
    while True:
        internal = nodes.feature[current] >= 0
        if not internal.any():
            return current
        rows = np.nonzero(internal)[0]
        slots = current[rows]
        goes_left = X[rows, nodes.feature[slots]] < nodes.threshold[slots]
        current[rows] = np.where(goes_left, nodes.left[slots], nodes.right[slots])


@dataclass
class DecisionTree:
    kind = "decision_tree"

    nodes: TreeNodes
    config: TrainConfig
    schema_hash: str | None = None

    def score(self, X: np.ndarray) -> np.ndarray:
        leaves = apply_nodes(self.nodes, X)
        p = self.nodes.pos_count[leaves] / self.nodes.total_count[leaves]
        return 2.0 * p - 1.0

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        leaves = apply_nodes(self.nodes, X)
        return (self.nodes.pos_count[leaves] + 1.0) / (self.nodes.total_count[leaves] + 2.0)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_json(),
            "schema_hash": self.schema_hash,
            "parameters": {"nodes": self.nodes.to_json()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DecisionTree":
        return cls(
            nodes=TreeNodes.from_json(doc["parameters"]["nodes"]),
            config=TrainConfig.from_json(doc["config"]),
            schema_hash=doc.get("schema_hash"),
        )


def fit_decision_tree(
    X: np.ndarray, y: np.ndarray, cfg: TrainConfig, schema_hash: str | None = None
) -> DecisionTree:
    rng = np.random.default_rng(cfg.seed)  # unused: a lone tree sees all features
    nodes = build_nodes(X, y, np.arange(len(X)), cfg, rng, max_features=X.shape[1])
    return DecisionTree(nodes=nodes, config=cfg, schema_hash=schema_hash)
