"""Evaluation metrics: recall, cost, ROC-AUC, and recall-cost curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .dataset import EncodedDataset
from .errors import UndefinedAUCError


class RecallValue(NamedTuple):
    value: float
    degenerate: bool  # True when there were no targets to find


def total_recall(found: int, total: int) -> RecallValue:
    """Fraction of actionable warnings found. With zero targets every run has
    trivially found them all, so the value is 1.0 with the degenerate flag."""
    if found < 0 or total < 0:
        raise ValueError("counts must be non-negative")
    if found > total:
        raise ValueError("found cannot exceed total")
    if total == 0:
        return RecallValue(1.0, True)
    return RecallValue(found / total, False)


def cost(labeled: int, pool: int) -> float:
    """Fraction of the pool inspected so far."""
    if pool <= 0:
        raise ValueError("pool size must be positive")
    if labeled < 0 or labeled > pool:
        raise ValueError("labeled count must be within [0, pool]")
    return labeled / pool


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, ties averaged."""
    n = len(scores)
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    new_group[1:] = sorted_scores[1:] != sorted_scores[:-1]
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    first_rank = np.concatenate(([0], np.cumsum(counts)[:-1])) + 1.0
    mean_rank = first_rank + (counts - 1) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = mean_rank[group]
    return ranks


def roc_auc(scores, labels) -> float:
    """Rank-based ROC-AUC: the probability a random positive outscores a
    random negative, with tied pairs counted one half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.shape != scores.shape:
        raise ValueError("scores and labels must be 1-D and aligned")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    pos = labels == 1
    neg = labels == -1
    if not np.all(pos | neg):
        raise ValueError("labels must contain only +1 and -1")
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC needs at least one positive and one negative")
    ranks = _average_ranks(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass(frozen=True)
class CostAtRecall:
    cost: float
    reached: bool


@dataclass
class RecallCostCurve:
    """Recall as a function of inspection cost, one point per label."""

    points: tuple[tuple[float, float], ...]
    n_pool: int
    n_targets: int
    status: str = "ok"  # "ok" | "no_targets" | "exhausted"

    def __post_init__(self) -> None:
        self.points = tuple((float(c), float(r)) for c, r in self.points)
        costs = [c for c, _ in self.points]
        recalls = [r for _, r in self.points]
        if any(b <= a for a, b in zip(costs, costs[1:])):
            raise ValueError("costs must be strictly increasing")
        if any(b < a for a, b in zip(recalls, recalls[1:])):
            raise ValueError("recalls must be non-decreasing")
        if self.points:
            if not (0.0 < costs[0] and costs[-1] <= 1.0):
                raise ValueError("costs must lie in (0, 1]")
            if not (0.0 <= recalls[0] and recalls[-1] <= 1.0):
                raise ValueError("recalls must lie in [0, 1]")

    @property
    def final_recall(self) -> float:
        return self.points[-1][1] if self.points else 0.0

    def cost_at(self, threshold: float) -> CostAtRecall:
        if not (0.0 < threshold <= 1.0):
            raise ValueError("threshold must be in (0, 1]")
        for c, r in self.points:
            if r >= threshold:
                return CostAtRecall(cost=c, reached=True)
        return CostAtRecall(cost=1.0, reached=False)

    def recall_at(self, max_cost: float) -> float:
        """Recall after spending at most max_cost of the pool."""
        if not (0.0 <= max_cost <= 1.0):
            raise ValueError("max_cost must be in [0, 1]")
        recall = 0.0
        for c, r in self.points:
            if c > max_cost:
                break
            recall = r
        return recall

    def auc(self) -> float:
        """Area under the recall step function over cost in [0, 1]; the final
        recall is held constant out to cost 1."""
        area = 0.0
        prev_cost = 0.0
        prev_recall = 0.0
        for c, r in self.points:
            area += prev_recall * (c - prev_cost)
            prev_cost, prev_recall = c, r
        area += prev_recall * (1.0 - prev_cost)
        return area

    def rows(self) -> list[tuple[int, float, float]]:
        return [(k + 1, c, r) for k, (c, r) in enumerate(self.points)]

    def write_csv(self, path: str | Path) -> None:
        lines = ["labels,cost,recall"]
        lines += [f"{k},{c!r},{r!r}" for k, c, r in self.rows()]
        Path(path).write_text("\n".join(lines) + "\n")

    def to_json(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "n_pool": self.n_pool,
            "n_targets": self.n_targets,
            "status": self.status,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RecallCostCurve":
        return cls(
            points=tuple((c, r) for c, r in doc["points"]),
            n_pool=int(doc["n_pool"]),
            n_targets=int(doc["n_targets"]),
            status=doc.get("status", "ok"),
        )


def _truth_items(ground_truth) -> dict[str, int]:
    if isinstance(ground_truth, EncodedDataset):
        return ground_truth.truth_map()
    return {str(k): int(v) for k, v in dict(ground_truth).items()}


def curve_from_ranking(order: Iterable[str], ground_truth) -> RecallCostCurve:
    """Curve produced by inspecting a fixed ranking front to back.

    Point k is (k/|pool|, found_after_k/|targets|). ground_truth is an
    EncodedDataset or a mapping id -> +1/-1; order must be a permutation of
    its ids.
    """
    truth = _truth_items(ground_truth)
    order = list(order)
    if len(order) != len(truth) or set(order) != set(truth):
        raise ValueError("order must be a permutation of the ground-truth ids")
    if any(v not in (-1, 1) for v in truth.values()):
        raise ValueError("ground truth must label every id +1 or -1")
    n = len(order)
    n_targets = sum(1 for v in truth.values() if v == 1)
    points = []
    found = 0
    for k, wid in enumerate(order, start=1):
        if truth[wid] == 1:
            found += 1
        recall = found / n_targets if n_targets else 1.0
        points.append((k / n, recall))
    status = "ok" if n_targets else "no_targets"
    return RecallCostCurve(points=tuple(points), n_pool=n, n_targets=n_targets, status=status)


def cost_at_recall(curve: RecallCostCurve, threshold: float) -> CostAtRecall:
    return curve.cost_at(threshold)


def session_auc(state, method: str = "query_order") -> float:
    """AUC of a finished (or stopped) active session against pool ground truth.

    "query_order" ranks queried warnings by how early they were asked about
    (earliest highest) and places never-queried warnings below all of them,
    ordered by the final model's probability (0.5 each when no model exists).
    "final_model" ignores the query order and scores the whole pool with the
    final model's probabilities.
    """
    pool = state.pool
    y = np.asarray(pool.y)
    if np.any(y == 0):
        raise ValueError("session_auc needs full ground truth for the pool")
    queried = [getattr(ev, "id", ev) for ev in state.query_history]
    model = state.model
    if method == "final_model":
        if model is None:
            raise ValueError("final_model construction requires a trained model")
        scores = np.asarray(model.predict_proba(pool.X), dtype=np.float64)
    elif method == "query_order":
        if model is not None:
            scores = np.asarray(model.predict_proba(pool.X), dtype=np.float64)
        else:
            scores = np.full(len(pool), 0.5)
        m = len(queried)
        for k, wid in enumerate(queried):
            scores[pool.row_of(wid)] = (m - k) + 1.0  # always above any probability
    else:
        raise ValueError(f"unknown session_auc method '{method}'")
    return roc_auc(scores, y)


@dataclass
class RunSummary:
    values: tuple[float, ...]
    median: float
    q25: float
    q75: float

    @property
    def iqr(self) -> float:
        return self.q75 - self.q25


def summarize(values: Iterable[float]) -> RunSummary:
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError("cannot summarize an empty value list")
    arr = np.asarray(vals)
    return RunSummary(
        values=vals,
        median=float(np.median(arr)),
        q25=float(np.percentile(arr, 25)),
        q75=float(np.percentile(arr, 75)),
    )
