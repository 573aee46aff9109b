from __future__ import annotations

import numpy as np
import pytest

from warnsift.dataset import EncodedDataset, FeatureSchema, FeatureSpec


def make_pool(n: int, prevalence: float, seed: int, separation: float = 2.5) -> EncodedDataset:
    """Linear toy pool: two informative dimensions plus noise, positives
    shifted by `separation` along the informative direction."""
    rng = np.random.default_rng(seed)
    n_pos = max(1, round(n * prevalence))
    y = np.array([1] * n_pos + [-1] * (n - n_pos), dtype=np.int8)
    rng.shuffle(y)
    d = 6
    X = rng.standard_normal((n, d))
    X[y == 1, 0] += separation
    X[y == 1, 1] += 0.5 * separation
    schema = FeatureSchema(
        features=[FeatureSpec(name=f"f{i}", kind="numeric", mean=0.0, sd=1.0) for i in range(d)]
    )
    ids = [f"w{i:04d}" for i in range(n)]
    return EncodedDataset(X=X, y=y, ids=ids, schema=schema)


@pytest.fixture
def small_pool() -> EncodedDataset:
    return make_pool(120, 0.15, seed=7)


def write_warning_csv(path, rows: list[dict], header: list[str] | None = None) -> None:
    import csv

    if header is None:
        header = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
