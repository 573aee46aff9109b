"""Reference rankers the active session is compared against."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import EncodedDataset, VersionPair
from .learners import TrainConfig, train
from .metrics import RecallCostCurve, curve_from_ranking, roc_auc

DEFAULT_RUN_SEEDS: tuple[int, ...] = tuple(range(10))


def random_ranking(pool: EncodedDataset, seed: int) -> list[str]:
    """Seeded uniform permutation of the pool ids."""
    perm = np.random.default_rng(seed).permutation(len(pool))
    return [pool.ids[i] for i in perm]


def random_curve(pool: EncodedDataset, seed: int) -> RecallCostCurve:
    return curve_from_ranking(random_ranking(pool, seed), pool)


@dataclass
class SupervisedResult:
    order: list[str]
    curve: RecallCostCurve
    probabilities: np.ndarray  # aligned with pair.test rows
    auc: float
    model: object


def supervised_run(pair: VersionPair, cfg: TrainConfig) -> SupervisedResult:
    """Train on the older version, rank the newer one by descending
    probability of being actionable (ties by row index)."""
    known = pair.train.y != 0
    model = train(
        pair.train.X[known],
        pair.train.y[known],
        cfg,
        schema_hash=pair.schema.digest(),
    )
    probs = np.asarray(model.predict_proba(pair.test.X), dtype=np.float64)
    order_rows = np.argsort(-probs, kind="stable")
    order = [pair.test.ids[i] for i in order_rows]
    return SupervisedResult(
        order=order,
        curve=curve_from_ranking(order, pair.test),
        probabilities=probs,
        auc=roc_auc(probs, pair.test.y),
        model=model,
    )


def supervised_ranking(pair: VersionPair, cfg: TrainConfig) -> tuple[list[str], RecallCostCurve]:
    result = supervised_run(pair, cfg)
    return result.order, result.curve
