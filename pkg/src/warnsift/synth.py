"""Deterministic synthetic warning corpus.

Generates per-project CSVs whose row counts per outcome (still open, closed,
deleted) match the published nine-project FindBugs triage benchmark, with a
23-feature schema (4 categorical, 19 numeric) whose class-conditional signal
is strong enough for linear models to rank well but far from clean separation.
Feature values are shaped to look like the real thing: probabilities in
[0, 1], ages and lifetimes in whole days, line counts as integers.

Everything is keyed off (project, version), so regenerating a file always
produces identical bytes.
"""

from __future__ import annotations

import csv
import zlib
from pathlib import Path

import numpy as np

# project -> (open, closed, deleted) rows in the newest version
PROJECT_SHAPES: dict[str, tuple[int, int, int]] = {
    "ant": (1061, 54, 0),
    "cass": (2245, 356, 64),
    "commons": (744, 42, 0),
    "derby": (2386, 121, 0),
    "jmeter": (468, 145, 7),
    "lucence": (2257, 1168, 440),
    "mvn": (790, 28, 44),
    "phoenix": (2046, 343, 13),
    "tomcat": (1115, 326, 0),
}

PROJECTS: tuple[str, ...] = tuple(sorted(PROJECT_SHAPES))

_WARNING_PATTERNS = [
    "NP_NULL_ON_SOME_PATH",
    "DM_DEFAULT_ENCODING",
    "EI_EXPOSE_REP",
    "EI_EXPOSE_REP2",
    "SE_BAD_FIELD",
    "RCN_REDUNDANT_NULLCHECK",
    "DLS_DEAD_LOCAL_STORE",
    "URF_UNREAD_FIELD",
    "MS_SHOULD_BE_FINAL",
    "IS2_INCONSISTENT_SYNC",
    "OS_OPEN_STREAM",
    "REC_CATCH_EXCEPTION",
    "SBSC_USE_STRINGBUFFER_CONCATENATION",
    "WMI_WRONG_MAP_ITERATOR",
]
_WARNING_TYPES = [
    "CORRECTNESS",
    "BAD_PRACTICE",
    "STYLE",
    "PERFORMANCE",
    "MT_CORRECTNESS",
    "MALICIOUS_CODE",
    "I18N",
]
_VISIBILITIES = ["public", "private", "protected", "package", "none"]
_SIGNATURES = ["()V", "(I)Z", "(Ljava/lang/String;)V", "()Z", "(II)I", "(J)V", "none"]

# how far the actionable class is shifted on each numeric feature, in sds
_NUMERIC_EFFECTS: dict[str, float] = {
    "warning_context_in_method": 1.25,
    "warning_context_in_file": 1.00,
    "warning_context_for_warning_type": 0.80,
    "defect_likelihood_for_warning_pattern": 1.80,
    "discretization_of_defect_likelihood": 0.0,  # derived column, see below
    "average_lifetime_for_warning_type": -0.65,
    "warning_lifetime_by_revision": -1.20,
    "file_age": -0.60,
    "latest_file_modification_age": -0.45,
    "file_creation_revision": 0.0,
    "developers_in_file": 0.35,
    "added_loc_in_file_past_25_revisions": 0.65,
    "deleted_loc_in_file_past_25_revisions": 0.40,
    "modified_directories_in_commit": 0.0,
    "lines_of_code_in_file": 0.0,
    "comment_code_ratio_in_file": 0.25,
    "methods_in_file": 0.0,
    "classes_in_package": 0.0,
    "warnings_in_package": 0.0,
}

FEATURE_NAMES: tuple[str, ...] = (
    "warning_pattern",
    "warning_type",
    "method_visibility",
    "method_signature",
    *_NUMERIC_EFFECTS.keys(),
)

LABEL_TOKENS = {"positive": "close", "negative": "open", "deleted": "delete"}


def _project_rng(project: str, version: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([zlib.crc32(project.encode()), version, 0x5EED])
    )


def _category_profiles(
    rng: np.random.Generator, n_cats: int, divergence: float
) -> tuple[np.ndarray, np.ndarray]:
    """Two multinomial profiles over the same categories; divergence 0 makes
    them identical."""
    base = rng.dirichlet(np.full(n_cats, 2.0))
    tilt = rng.dirichlet(np.full(n_cats, 1.0))
    pos = (1.0 - divergence) * base + divergence * tilt
    return base / base.sum(), pos / pos.sum()


def _draw_rows(
    rng: np.random.Generator, id_prefix: str, n_pos: int, n_neg: int, n_del: int
) -> list[dict]:
    # per-corpus flavor: signal strength wobbles a little around 1
    strength = 0.9 + 0.2 * rng.random()

    n = n_pos + n_neg + n_del
    outcome = np.array(["close"] * n_pos + ["open"] * n_neg + ["delete"] * n_del)
    rng.shuffle(outcome)
    is_pos = outcome == "close"

    cat_columns: dict[str, np.ndarray] = {}
    for name, cats, divergence in (
        ("warning_pattern", _WARNING_PATTERNS, 0.75),
        ("warning_type", _WARNING_TYPES, 0.50),
        ("method_visibility", _VISIBILITIES, 0.20),
        ("method_signature", _SIGNATURES, 0.0),
    ):
        neg_p, pos_p = _category_profiles(rng, len(cats), divergence)
        draws = np.where(
            is_pos,
            rng.choice(len(cats), size=n, p=pos_p),
            rng.choice(len(cats), size=n, p=neg_p),
        )
        cat_columns[name] = np.array(cats)[draws]

    latent: dict[str, np.ndarray] = {}
    for name, delta in _NUMERIC_EFFECTS.items():
        z = rng.standard_normal(n)
        latent[name] = z + strength * delta * is_pos

    num_columns: dict[str, np.ndarray] = {}

    def days(z: np.ndarray, scale: float, base: float) -> np.ndarray:
        return np.round(base * np.exp(0.5 * z) + scale).astype(np.int64)

    num_columns["warning_context_in_method"] = np.round(np.tanh(0.6 * latent["warning_context_in_method"]), 4)
    num_columns["warning_context_in_file"] = np.round(np.tanh(0.6 * latent["warning_context_in_file"]), 4)
    num_columns["warning_context_for_warning_type"] = np.round(
        np.tanh(0.6 * latent["warning_context_for_warning_type"]), 4
    )
    likelihood = 1.0 / (1.0 + np.exp(-0.9 * latent["defect_likelihood_for_warning_pattern"]))
    num_columns["defect_likelihood_for_warning_pattern"] = np.round(likelihood, 4)
    num_columns["discretization_of_defect_likelihood"] = np.round(likelihood, 1)
    num_columns["average_lifetime_for_warning_type"] = days(
        latent["average_lifetime_for_warning_type"], 30.0, 120.0
    )
    num_columns["warning_lifetime_by_revision"] = days(latent["warning_lifetime_by_revision"], 5.0, 60.0)
    num_columns["file_age"] = days(latent["file_age"], 60.0, 400.0)
    num_columns["latest_file_modification_age"] = days(latent["latest_file_modification_age"], 1.0, 45.0)
    num_columns["file_creation_revision"] = np.round(
        2000.0 + 1500.0 / (1.0 + np.exp(-0.8 * latent["file_creation_revision"]))
    ).astype(np.int64)
    num_columns["developers_in_file"] = np.maximum(
        1, np.round(3.0 + 1.6 * latent["developers_in_file"]).astype(np.int64)
    )
    num_columns["added_loc_in_file_past_25_revisions"] = np.round(
        80.0 * np.exp(0.6 * latent["added_loc_in_file_past_25_revisions"])
    ).astype(np.int64)
    num_columns["deleted_loc_in_file_past_25_revisions"] = np.round(
        40.0 * np.exp(0.6 * latent["deleted_loc_in_file_past_25_revisions"])
    ).astype(np.int64)
    num_columns["modified_directories_in_commit"] = np.maximum(
        1, np.round(2.0 + latent["modified_directories_in_commit"]).astype(np.int64)
    )
    num_columns["lines_of_code_in_file"] = np.round(
        300.0 * np.exp(0.5 * latent["lines_of_code_in_file"])
    ).astype(np.int64)
    num_columns["comment_code_ratio_in_file"] = np.round(
        1.0 / (1.0 + np.exp(-0.7 * latent["comment_code_ratio_in_file"])), 3
    )
    num_columns["methods_in_file"] = np.maximum(
        1, np.round(12.0 + 5.0 * latent["methods_in_file"]).astype(np.int64)
    )
    num_columns["classes_in_package"] = np.maximum(
        1, np.round(9.0 + 4.0 * latent["classes_in_package"]).astype(np.int64)
    )
    num_columns["warnings_in_package"] = np.maximum(
        0, np.round(20.0 + 10.0 * latent["warnings_in_package"]).astype(np.int64)
    )

    rows = []
    for i in range(n):
        row = {"id": f"{id_prefix}-{i:05d}"}
        for name in FEATURE_NAMES:
            col = cat_columns.get(name)
            row[name] = str(col[i]) if col is not None else str(num_columns[name][i])
        row["category"] = str(outcome[i])
        rows.append(row)
    return rows


def project_rows(project: str, version: int = 5) -> list[dict]:
    """All rows of one project version as dicts (id, features, category)."""
    if project not in PROJECT_SHAPES:
        raise ValueError(f"unknown project '{project}' (pick from {', '.join(PROJECTS)})")
    n_neg, n_pos, n_del = PROJECT_SHAPES[project]
    if version < 5:  # earlier versions are smaller, same generating process
        shrink = 0.9 ** (5 - version)
        n_neg = max(1, round(n_neg * shrink))
        n_pos = max(1, round(n_pos * shrink))
        n_del = round(n_del * shrink)
    return _draw_rows(_project_rng(project, version), f"{project}-v{version}", n_pos, n_neg, n_del)


def write_rows(rows: list[dict], path: Path) -> None:
    fieldnames = ["id", *FEATURE_NAMES, "category"]
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_project(project: str, version: int, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{project}_v{version}.csv"
    write_rows(project_rows(project, version), path)
    return path


def write_corpus(out_dir: Path, projects: tuple[str, ...] = PROJECTS, versions: tuple[int, ...] = (4, 5)) -> list[Path]:
    return [write_project(p, v, out_dir) for p in projects for v in versions]


def small_pool_rows(n: int, prevalence: float, seed: int) -> list[dict]:
    """A compact single-version pool for demos and end-to-end tests."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xDE30]))
    n_pos = max(1, round(n * prevalence))
    return _draw_rows(rng, f"demo-{seed}", n_pos, n - n_pos, 0)


def write_small_pool(path: Path, n: int = 50, prevalence: float = 0.3, seed: int = 0) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    write_rows(small_pool_rows(n, prevalence, seed), path)
    return path
