"""Loading, schema fitting, and numeric encoding of warning datasets.

A dataset is a CSV with an id column, feature columns, and (optionally) a
label column. Features are typed by inspection: a column is numeric iff every
observed value parses as a finite number, otherwise it is categorical.
Numeric columns are z-standardized with statistics from the fitting data;
categoricals are one-hot encoded against a vocabulary in first-seen order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import EmptyDatasetError, SchemaError

ID_COLUMN = "id"
DEFAULT_LABEL_COLUMN = "category"
DEFAULT_POSITIVE = "close"
DEFAULT_NEGATIVE = "open"
DEFAULT_DELETED = "delete"


class Label(str, Enum):
    ACTIONABLE = "actionable"
    UNACTIONABLE = "unactionable"
    DELETED = "deleted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class WarningRecord:
    id: str
    features: dict[str, str]
    label: Label


@dataclass
class FeatureSpec:
    """Typed description of one raw feature column."""

    name: str
    kind: str  # "numeric" | "categorical"
    mean: float = 0.0
    sd: float = 0.0
    vocabulary: tuple[str, ...] = ()

    def width(self) -> int:
        return 1 if self.kind == "numeric" else len(self.vocabulary)


@dataclass
class FeatureSchema:
    features: list[FeatureSpec] = field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def n_columns(self) -> int:
        return sum(f.width() for f in self.features)

    def column_names(self) -> list[str]:
        cols: list[str] = []
        for f in self.features:
            if f.kind == "numeric":
                cols.append(f.name)
            else:
                cols.extend(f"{f.name}={v}" for v in f.vocabulary)
        return cols

    def to_json(self) -> dict:
        return {
            "features": [
                {
                    "name": f.name,
                    "kind": f.kind,
                    "mean": f.mean,
                    "sd": f.sd,
                    "vocabulary": list(f.vocabulary),
                }
                for f in self.features
            ]
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FeatureSchema":
        return cls(
            features=[
                FeatureSpec(
                    name=d["name"],
                    kind=d["kind"],
                    mean=float(d.get("mean", 0.0)),
                    sd=float(d.get("sd", 0.0)),
                    vocabulary=tuple(d.get("vocabulary", ())),
                )
                for d in doc["features"]
            ]
        )

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class EncodedDataset:
    X: np.ndarray  # (n, d) float64, all finite
    y: np.ndarray  # (n,) int8: +1 actionable, -1 unactionable, 0 unknown
    ids: list[str]
    schema: FeatureSchema

    def __post_init__(self) -> None:
        self._row_of = {wid: i for i, wid in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_targets(self) -> int:
        return int(np.sum(self.y == 1))

    def row_of(self, warning_id: str) -> int:
        return self._row_of[warning_id]

    def truth_map(self) -> dict[str, int]:
        return {wid: int(v) for wid, v in zip(self.ids, self.y)}


@dataclass
class VersionPair:
    train: EncodedDataset
    test: EncodedDataset

    @property
    def schema(self) -> FeatureSchema:
        return self.train.schema


def _parse_finite(value: str) -> float | None:
    try:
        out = float(value)
    except (TypeError, ValueError):
        return None
    return out if math.isfinite(out) else None


def load_csv(
    path: str | Path,
    label_column: str | None = DEFAULT_LABEL_COLUMN,
    positive_token: str = DEFAULT_POSITIVE,
    negative_token: str = DEFAULT_NEGATIVE,
    deleted_token: str = DEFAULT_DELETED,
) -> list[WarningRecord]:
    """Read one CSV into records. label_column=None leaves labels unknown."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path.name}: file is empty (no header row)") from None
        if ID_COLUMN not in header:
            raise SchemaError(f"{path.name}: missing required column '{ID_COLUMN}'")
        if label_column is not None and label_column not in header:
            raise SchemaError(f"{path.name}: missing label column '{label_column}'")
        seen = set()
        for col in header:
            if col in seen:
                raise SchemaError(f"{path.name}: duplicate column '{col}'")
            seen.add(col)
        id_pos = header.index(ID_COLUMN)
        label_pos = header.index(label_column) if label_column is not None else None
        feature_cols = [
            (i, c)
            for i, c in enumerate(header)
            if i != id_pos and i != label_pos
        ]

        records: list[WarningRecord] = []
        ids_seen: set[str] = set()
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(
                    f"{path.name}: row {rownum} has {len(row)} fields, expected {len(header)}"
                )
            wid = row[id_pos]
            if wid in ids_seen:
                raise SchemaError(f"{path.name}: row {rownum} repeats id '{wid}'")
            ids_seen.add(wid)
            if label_pos is None:
                label = Label.UNKNOWN
            else:
                token = row[label_pos]
                if token == positive_token:
                    label = Label.ACTIONABLE
                elif token == negative_token:
                    label = Label.UNACTIONABLE
                elif token == deleted_token:
                    label = Label.DELETED
                else:
                    raise SchemaError(
                        f"{path.name}: row {rownum} has unknown label token '{token}'"
                        f" in column '{label_column}'"
                    )
            features = {name: row[i] for i, name in feature_cols}
            records.append(WarningRecord(id=wid, features=features, label=label))
    return records


def _live(records: list[WarningRecord]) -> list[WarningRecord]:
    return [r for r in records if r.label is not Label.DELETED]


def fit_schema(records: list[WarningRecord]) -> FeatureSchema:
    """Type each feature and fit encoding statistics on non-deleted records."""
    live = _live(records)
    if not live:
        raise EmptyDatasetError("no records remain after dropping deleted ones")
    names = list(live[0].features.keys())
    name_set = set(names)
    for r in live:
        if set(r.features.keys()) != name_set:
            raise SchemaError(f"record '{r.id}' does not have the fitted feature set")

    specs: list[FeatureSpec] = []
    for name in names:
        raw = [str(r.features[name]) for r in live]
        parsed = [_parse_finite(v) for v in raw]
        if all(p is not None for p in parsed):
            vals = np.asarray(parsed, dtype=np.float64)
            specs.append(
                FeatureSpec(
                    name=name,
                    kind="numeric",
                    mean=float(vals.mean()),
                    sd=float(vals.std()),  # population sd
                )
            )
        else:
            vocab: list[str] = []
            known = set()
            for v in raw:
                if v not in known:
                    known.add(v)
                    vocab.append(v)
            specs.append(FeatureSpec(name=name, kind="categorical", vocabulary=tuple(vocab)))
    return FeatureSchema(features=specs)


def encode(records: list[WarningRecord], schema: FeatureSchema) -> EncodedDataset:
    """Encode records under a fitted schema. Deleted records are dropped;
    surviving row order matches the input order."""
    live = _live(records)
    name_set = set(schema.names)
    for r in live:
        if set(r.features.keys()) != name_set:
            raise SchemaError(f"record '{r.id}' does not match the schema feature set")

    n, d = len(live), schema.n_columns
    X = np.zeros((n, d), dtype=np.float64)
    col = 0
    for spec in schema.features:
        if spec.kind == "numeric":
            for i, r in enumerate(live):
                v = _parse_finite(str(r.features[spec.name]))
                if v is None:
                    raise SchemaError(
                        f"record '{r.id}': non-numeric value "
                        f"'{r.features[spec.name]}' in numeric column '{spec.name}'"
                    )
                X[i, col] = (v - spec.mean) / spec.sd if spec.sd > 0 else 0.0
            col += 1
        else:
            index = {v: j for j, v in enumerate(spec.vocabulary)}
            for i, r in enumerate(live):
                j = index.get(str(r.features[spec.name]))
                if j is not None:  # unseen category -> all-zero block
                    X[i, col + j] = 1.0
            col += len(spec.vocabulary)

    label_code = {Label.ACTIONABLE: 1, Label.UNACTIONABLE: -1, Label.UNKNOWN: 0}
    y = np.array([label_code[r.label] for r in live], dtype=np.int8)
    return EncodedDataset(X=X, y=y, ids=[r.id for r in live], schema=schema)


def load_dataset(
    path: str | Path,
    label_column: str | None = DEFAULT_LABEL_COLUMN,
    positive_token: str = DEFAULT_POSITIVE,
    negative_token: str = DEFAULT_NEGATIVE,
    deleted_token: str = DEFAULT_DELETED,
) -> EncodedDataset:
    """Load one CSV and encode it under a schema fitted on itself."""
    records = load_csv(path, label_column, positive_token, negative_token, deleted_token)
    schema = fit_schema(records)
    return encode(records, schema)


def load_version_pair(
    train_path: str | Path,
    test_path: str | Path,
    label_column: str | None = DEFAULT_LABEL_COLUMN,
    positive_token: str = DEFAULT_POSITIVE,
    negative_token: str = DEFAULT_NEGATIVE,
    deleted_token: str = DEFAULT_DELETED,
) -> VersionPair:
    """Load an older/newer version pair; the schema (types, vocabularies,
    standardization statistics) is fitted on the train side only."""
    train_records = load_csv(train_path, label_column, positive_token, negative_token, deleted_token)
    test_records = load_csv(test_path, label_column, positive_token, negative_token, deleted_token)
    schema = fit_schema(train_records)
    return VersionPair(
        train=encode(train_records, schema),
        test=encode(test_records, schema),
    )
