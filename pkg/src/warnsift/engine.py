"""Incremental active-learning session over a warning pool.

A session starts by sampling at random (cold phase). Once the first
actionable warning is labeled it switches to uncertainty sampling (query the
warning with score closest to zero); once the labeled-actionable count reaches
the switch threshold it moves to certainty sampling (query the warning the
model is most confident is actionable) for the rest of the run.

Each retrain set is the labeled warnings, padded with presumptive negatives
(randomly drawn unlabeled warnings presumed unactionable, redrawn fresh every
retrain), then reduced by aggressive undersampling in the certainty phase
(all positives kept, only the most negative-scoring negatives kept, down to
the positive count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dataset import EncodedDataset, Label
from .errors import (
    AlreadyLabeledError,
    EmptyDatasetError,
    PoolExhaustedError,
    SchemaError,
    UnknownIdError,
)
from .learners import TrainConfig, default_config, model_from_json, model_to_json, train

_COLD_STREAM = 7
_PRESUMPTIVE_STREAM = 101


class Phase(str, Enum):
    COLD = "cold_sampling"
    UNCERTAINTY = "uncertainty"
    CERTAINTY = "certainty"


@dataclass
class EngineConfig:
    learner: TrainConfig = field(default_factory=lambda: default_config("svm"))
    certainty_switch_threshold: int = 10
    undersampling: bool = True
    presumptive_negatives: bool = True
    stop_recall: float = 0.95
    batch_size: int = 1
    warm_start_model: object | None = None

    def validated(self) -> "EngineConfig":
        self.learner.validated()
        if self.certainty_switch_threshold < 1:
            raise ValueError("certainty_switch_threshold must be at least 1")
        if not (0.0 < self.stop_recall <= 1.0):
            raise ValueError("stop_recall must be in (0, 1]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        warm = self.warm_start_model
        if warm is not None and getattr(warm, "kind", None) != self.learner.kind:
            raise ValueError("warm_start_model kind must match the learner kind")
        return self

    def to_json(self) -> dict:
        return {
            "learner": self.learner.to_json(),
            "certainty_switch_threshold": self.certainty_switch_threshold,
            "undersampling": self.undersampling,
            "presumptive_negatives": self.presumptive_negatives,
            "stop_recall": self.stop_recall,
            "batch_size": self.batch_size,
            "warm_start_model": None
            if self.warm_start_model is None
            else model_to_json(self.warm_start_model),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "EngineConfig":
        warm = doc.get("warm_start_model")
        return cls(
            learner=TrainConfig.from_json(doc["learner"]),
            certainty_switch_threshold=int(doc["certainty_switch_threshold"]),
            undersampling=bool(doc["undersampling"]),
            presumptive_negatives=bool(doc["presumptive_negatives"]),
            stop_recall=float(doc["stop_recall"]),
            batch_size=int(doc["batch_size"]),
            warm_start_model=None if warm is None else model_from_json(warm),
        ).validated()


@dataclass(frozen=True)
class QueryEvent:
    step: int
    id: str
    label: Label


def _as_label(value) -> Label:
    label = Label(value)
    if label not in (Label.ACTIONABLE, Label.UNACTIONABLE):
        raise ValueError(f"sessions only accept actionable/unactionable labels, got '{label.value}'")
    return label


class SessionState:
    """Mutable state of one labeling session. Use init_session to create."""

    def __init__(self, pool: EncodedDataset, config: EngineConfig, rng_seed: int):
        if len(pool) == 0:
            raise EmptyDatasetError("cannot start a session on an empty pool")
        if rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")
        config.validated()
        warm = config.warm_start_model
        if warm is not None and warm.schema_hash is not None:
            if warm.schema_hash != pool.schema.digest():
                raise SchemaError("warm-start model was trained under a different schema")
        self.pool = pool
        self.config = config
        self.rng_seed = rng_seed
        self.model = warm
        self.phase = Phase.UNCERTAINTY if warm is not None else Phase.COLD
        self.query_history: list[QueryEvent] = []
        self.retrain_count = 0
        n = len(pool)
        self._labeled_mask = np.zeros(n, dtype=bool)
        self._labels = np.zeros(n, dtype=np.int8)
        self._positive_count = 0
        self._cold_order = np.random.default_rng(
            np.random.SeedSequence([rng_seed, _COLD_STREAM])
        ).permutation(n)
        self._cold_pos = 0

    # -- read-only views -------------------------------------------------

    @property
    def targets_found(self) -> int:
        return self._positive_count

    @property
    def labeled_count(self) -> int:
        return len(self.query_history)

    @property
    def labeled_ids(self) -> list[str]:
        return [ev.id for ev in self.query_history]

    def unlabeled_rows(self) -> np.ndarray:
        return np.nonzero(~self._labeled_mask)[0]

    def label_of(self, warning_id: str) -> Label | None:
        row = self.pool.row_of(warning_id)
        if not self._labeled_mask[row]:
            return None
        return Label.ACTIONABLE if self._labels[row] > 0 else Label.UNACTIONABLE

    # -- querying ---------------------------------------------------------

    def _cold_candidates(self, k: int) -> list[int]:
        # advance the cursor past labeled entries only; this keeps the method
        # idempotent while staying O(n) amortized over a session
        order = self._cold_order
        while self._cold_pos < len(order) and self._labeled_mask[order[self._cold_pos]]:
            self._cold_pos += 1
        out: list[int] = []
        i = self._cold_pos
        while i < len(order) and len(out) < k:
            if not self._labeled_mask[order[i]]:
                out.append(int(order[i]))
            i += 1
        return out

    def _ranked_unlabeled(self, keys: np.ndarray, k: int) -> list[int]:
        keys = keys.astype(np.float64, copy=True)
        keys[self._labeled_mask] = np.inf
        order = np.argsort(keys, kind="stable")  # ties -> lowest row index
        n_unlabeled = int((~self._labeled_mask).sum())
        return [int(i) for i in order[: min(k, n_unlabeled)]]

    def next_batch(self, k: int | None = None) -> list[str]:
        k = self.config.batch_size if k is None else k
        if k < 1:
            raise ValueError("batch size must be at least 1")
        if bool(self._labeled_mask.all()):
            raise PoolExhaustedError("every warning in the pool is labeled")
        if self.phase is Phase.COLD:
            rows = self._cold_candidates(k)
        elif self.phase is Phase.UNCERTAINTY:
            scores = np.asarray(self.model.score(self.pool.X), dtype=np.float64)
            rows = self._ranked_unlabeled(np.abs(scores), k)
        else:
            proba = np.asarray(self.model.predict_proba(self.pool.X), dtype=np.float64)
            rows = self._ranked_unlabeled(-proba, k)
        return [self.pool.ids[r] for r in rows]

    def next_query(self) -> str:
        return self.next_batch(1)[0]

    def remaining_ranking(self) -> list[tuple[str, float]]:
        """Unlabeled warnings ordered the way the current phase would query
        them, with the model's probability when one exists."""
        if self.model is not None:
            proba = np.asarray(self.model.predict_proba(self.pool.X), dtype=np.float64)
        else:
            proba = np.full(len(self.pool), 0.5)
        if self.phase is Phase.COLD:
            rows = self._cold_candidates(len(self.pool))
        elif self.phase is Phase.UNCERTAINTY:
            scores = np.asarray(self.model.score(self.pool.X), dtype=np.float64)
            rows = self._ranked_unlabeled(np.abs(scores), len(self.pool))
        else:
            rows = self._ranked_unlabeled(-proba, len(self.pool))
        return [(self.pool.ids[r], float(proba[r])) for r in rows]

    # -- labeling ---------------------------------------------------------

    def submit_label(self, warning_id: str, label, retrain: bool = True) -> None:
        label = _as_label(label)
        try:
            row = self.pool.row_of(warning_id)
        except KeyError:
            raise UnknownIdError(f"'{warning_id}' is not in the session pool") from None
        if self._labeled_mask[row]:
            raise AlreadyLabeledError(f"'{warning_id}' is already labeled")
        self._labeled_mask[row] = True
        self._labels[row] = 1 if label is Label.ACTIONABLE else -1
        if label is Label.ACTIONABLE:
            self._positive_count += 1
        self.query_history.append(QueryEvent(step=len(self.query_history), id=warning_id, label=label))
        self._update_phase()
        if retrain and self._positive_count >= 1:
            self._retrain()

    def _update_phase(self) -> None:
        if self.phase is Phase.COLD and self._positive_count >= 1:
            self.phase = Phase.UNCERTAINTY
        if self.phase is Phase.UNCERTAINTY and (
            self._positive_count >= self.config.certainty_switch_threshold
        ):
            self.phase = Phase.CERTAINTY

    def build_training_set(self) -> tuple[np.ndarray, np.ndarray]:
        """Assemble the next training set from the current state.

        Idempotent at a given state: the presumptive draw is keyed by the
        retrain counter, so calling this repeatedly (or after a checkpoint
        restore) yields the same set.
        """
        labeled_rows = np.nonzero(self._labeled_mask)[0]
        parts_X = [self.pool.X[labeled_rows]]
        parts_y = [self._labels[labeled_rows].astype(np.int8)]
        if self.config.presumptive_negatives:
            unlabeled = self.unlabeled_rows()
            m = min(len(labeled_rows), len(unlabeled))
            if m > 0:
                rng = np.random.default_rng(
                    np.random.SeedSequence([self.rng_seed, _PRESUMPTIVE_STREAM, self.retrain_count])
                )
                picked = unlabeled[rng.choice(len(unlabeled), size=m, replace=False)]
                parts_X.append(self.pool.X[picked])
                parts_y.append(np.full(m, -1, dtype=np.int8))
        X = np.concatenate(parts_X, axis=0)
        y = np.concatenate(parts_y)
        if self.config.undersampling and self.phase is Phase.CERTAINTY and self.model is not None:
            X, y = _undersample(X, y, self.model)
        return X, y

    def _retrain(self) -> None:
        X, y = self.build_training_set()
        if not ((y > 0).any() and (y < 0).any()):
            if self.config.presumptive_negatives:
                return  # nothing unactionable anywhere: keep the current model
            # fall through so the degenerate-training error surfaces
        self.model = train(
            X,
            y,
            self.config.learner,
            warm_from=self.model,
            schema_hash=self.pool.schema.digest(),
        )
        self.retrain_count += 1

    # -- persistence --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format": "warnsift-session",
            "version": 1,
            "rng_seed": self.rng_seed,
            "phase": self.phase.value,
            "retrain_count": self.retrain_count,
            "config": self.config.to_json(),
            "history": [
                {"step": ev.step, "id": ev.id, "label": ev.label.value}
                for ev in self.query_history
            ],
            "model": None if self.model is None else model_to_json(self.model),
        }

    @classmethod
    def from_json(cls, pool: EncodedDataset, doc: dict) -> "SessionState":
        if doc.get("format") != "warnsift-session":
            raise ValueError("not a session checkpoint document")
        config = EngineConfig.from_json(doc["config"])
        state = cls(pool, config, int(doc["rng_seed"]))
        for entry in doc["history"]:
            wid = entry["id"]
            row = pool.row_of(wid)  # KeyError -> pool/checkpoint mismatch
            label = _as_label(entry["label"])
            state._labeled_mask[row] = True
            state._labels[row] = 1 if label is Label.ACTIONABLE else -1
            if label is Label.ACTIONABLE:
                state._positive_count += 1
            state.query_history.append(
                QueryEvent(step=int(entry["step"]), id=wid, label=label)
            )
        state.retrain_count = int(doc["retrain_count"])
        state.phase = Phase(doc["phase"])
        model_doc = doc.get("model")
        if model_doc is not None:
            state.model = model_from_json(model_doc)
        return state


def _undersample(X: np.ndarray, y: np.ndarray, model) -> tuple[np.ndarray, np.ndarray]:
    """Keep every positive; keep only the most negative-scoring negatives,
    as many as there are positives."""
    pos_rows = np.nonzero(y > 0)[0]
    neg_rows = np.nonzero(y < 0)[0]
    if len(neg_rows) <= len(pos_rows):
        return X, y
    neg_scores = np.asarray(model.score(X[neg_rows]), dtype=np.float64)
    keep_neg = neg_rows[np.argsort(neg_scores, kind="stable")[: len(pos_rows)]]
    keep = np.zeros(len(y), dtype=bool)
    keep[pos_rows] = True
    keep[keep_neg] = True
    return X[keep], y[keep]


def init_session(pool: EncodedDataset, config: EngineConfig, seed: int = 0) -> SessionState:
    return SessionState(pool, config, seed)


@dataclass
class SimulationResult:
    curve: "RecallCostCurve"
    state: SessionState | None
    seed: int


def run_simulation(pool: EncodedDataset, config: EngineConfig, seed: int = 0) -> SimulationResult:
    """Replay a full session against known labels, stopping once the labeled
    actionable count reaches stop_recall of all actionable warnings."""
    from .metrics import RecallCostCurve

    y = np.asarray(pool.y)
    if np.any(y == 0):
        raise ValueError("run_simulation needs ground truth for every pool row")
    n = len(pool)
    n_targets = int(np.sum(y == 1))
    if n_targets == 0:
        curve = RecallCostCurve(points=(), n_pool=n, n_targets=0, status="no_targets")
        return SimulationResult(curve=curve, state=None, seed=seed)

    state = init_session(pool, config, seed)

    def reached() -> bool:
        return state.targets_found / n_targets >= config.stop_recall

    points: list[tuple[float, float]] = []
    while not reached() and state.labeled_count < n:
        batch = state.next_batch()
        for wid in batch:
            truth = Label.ACTIONABLE if y[pool.row_of(wid)] == 1 else Label.UNACTIONABLE
            state.submit_label(wid, truth)
            points.append((state.labeled_count / n, state.targets_found / n_targets))
            if reached():
                break
    status = "ok" if reached() else "exhausted"
    curve = RecallCostCurve(points=tuple(points), n_pool=n, n_targets=n_targets, status=status)
    return SimulationResult(curve=curve, state=state, seed=seed)


def stop_target(stop_recall: float, n_targets: int) -> int:
    """Labeled-actionable count at which a simulation halts: the smallest k
    with k / n_targets >= stop_recall, under the same float arithmetic the
    simulation loop uses."""
    if n_targets == 0:
        return 0
    k = min(math.ceil(stop_recall * n_targets), n_targets)
    while k > 0 and (k - 1) / n_targets >= stop_recall:
        k -= 1
    while k / n_targets < stop_recall:
        k += 1
    return k
