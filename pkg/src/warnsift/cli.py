"""Command-line entry points.

Commands:

  demo-data   write the synthetic benchmark corpus (and small demo pools)
  simulate    replay active-learning sessions against labeled data
  baseline    random or supervised rankings over the same data
  report      aggregate run directories into a markdown report
  serve       start the labeling HTTP service
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from . import baselines, metrics, synth
from .dataset import (
    DEFAULT_DELETED,
    DEFAULT_LABEL_COLUMN,
    DEFAULT_NEGATIVE,
    DEFAULT_POSITIVE,
    load_dataset,
    load_version_pair,
)
from .engine import EngineConfig, run_simulation
from .errors import WarnsiftError
from .learners import KIND_ALIASES, default_config, train

COST_THRESHOLDS = (0.7, 0.8, 0.9, 0.95, 1.0)

_LEARNER_CHOICES = click.Choice(sorted(KIND_ALIASES), case_sensitive=False)


def _label_options(fn):
    fn = click.option("--label-column", default=DEFAULT_LABEL_COLUMN, show_default=True)(fn)
    fn = click.option("--positive", default=DEFAULT_POSITIVE, show_default=True)(fn)
    fn = click.option("--negative", default=DEFAULT_NEGATIVE, show_default=True)(fn)
    fn = click.option("--deleted", default=DEFAULT_DELETED, show_default=True)(fn)
    return fn


@click.group()
def main() -> None:
    """Active-learning triage tools for static-analysis warnings."""


@main.command("demo-data")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--project", "projects", multiple=True, type=click.Choice(synth.PROJECTS))
@click.option("--versions", default="4,5", show_default=True, help="comma-separated version numbers")
@click.option("--small", type=click.Path(path_type=Path), default=None,
              help="also write one small pool CSV to this path")
@click.option("--rows", default=50, show_default=True)
@click.option("--prevalence", default=0.3, show_default=True)
@click.option("--seed", default=0, show_default=True)
def demo_data(out: Path, projects, versions: str, small: Path | None, rows: int, prevalence: float, seed: int) -> None:
    """Generate the deterministic synthetic warning corpus."""
    chosen = tuple(projects) if projects else synth.PROJECTS
    version_list = tuple(int(v) for v in versions.split(","))
    paths = synth.write_corpus(out, chosen, version_list)
    for p in paths:
        click.echo(f"wrote {p}")
    if small is not None:
        p = synth.write_small_pool(small, n=rows, prevalence=prevalence, seed=seed)
        click.echo(f"wrote {p}")


def _summary_block(values: list[float]) -> dict:
    s = metrics.summarize(values)
    return {"median": s.median, "q25": s.q25, "q75": s.q75, "iqr": s.iqr}


def _write_run_outputs(out: Path, dataset_name: str, method: str, learner_kind: str,
                       per_seed: list[dict], extra: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    fieldnames = ["dataset", "method", "learner", "seed", "n_pool", "n_targets",
                  "labels", "final_recall", "auc", "recall_at_cost_0.5"]
    fieldnames += [f"cost_at_{t}" for t in COST_THRESHOLDS]
    with (out / "summary.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in per_seed:
            writer.writerow({k: row.get(k, "") for k in fieldnames})
    doc = {
        "dataset": dataset_name,
        "method": method,
        "learner": learner_kind,
        "seeds": [r["seed"] for r in per_seed],
        "per_seed": per_seed,
        "metrics": {
            "auc": _summary_block([r["auc"] for r in per_seed]),
            "recall_at_cost_0.5": _summary_block([r["recall_at_cost_0.5"] for r in per_seed]),
            **{
                f"cost_at_{t}": _summary_block([r[f"cost_at_{t}"] for r in per_seed])
                for t in COST_THRESHOLDS
            },
        },
        **extra,
    }
    (out / "summary.json").write_text(json.dumps(doc, indent=2) + "\n")


def _curve_row(dataset_name: str, method: str, learner_kind: str, seed: int,
               curve: metrics.RecallCostCurve, auc: float) -> dict:
    row = {
        "dataset": dataset_name,
        "method": method,
        "learner": learner_kind,
        "seed": seed,
        "n_pool": curve.n_pool,
        "n_targets": curve.n_targets,
        "labels": len(curve.points),
        "final_recall": curve.final_recall,
        "auc": auc,
        "recall_at_cost_0.5": curve.recall_at(0.5),
    }
    for t in COST_THRESHOLDS:
        row[f"cost_at_{t}"] = curve.cost_at(t).cost
    return row


@main.command("simulate")
@click.option("--data", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--train", "train_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="older version used to warm-start the session")
@click.option("--learner", default="svm", type=_LEARNER_CHOICES, show_default=True)
@click.option("--seeds", default=10, show_default=True, type=click.IntRange(min=1),
              help="run seeds 0..N-1")
@click.option("--stop", default=0.95, show_default=True, help="stop once this recall is reached")
@click.option("--threshold", default=10, show_default=True, type=click.IntRange(min=1),
              help="labeled positives before switching to certainty sampling")
@click.option("--batch", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--presumptive/--no-presumptive", default=True, show_default=True)
@click.option("--undersampling/--no-undersampling", default=True, show_default=True)
@click.option("--auc-method", default="query_order", show_default=True,
              type=click.Choice(["query_order", "final_model"]))
@click.option("--out", type=click.Path(path_type=Path), required=True)
@_label_options
def simulate(data: Path, train_path: Path | None, learner: str, seeds: int, stop: float,
             threshold: int, batch: int, presumptive: bool, undersampling: bool,
             auc_method: str, out: Path, label_column: str, positive: str,
             negative: str, deleted: str) -> None:
    """Replay labeling sessions against a fully labeled dataset."""
    tokens = dict(label_column=label_column, positive_token=positive,
                  negative_token=negative, deleted_token=deleted)
    try:
        warm = None
        if train_path is not None:
            pair = load_version_pair(train_path, data, **tokens)
            pool = pair.test
            known = pair.train.y != 0
            warm = train(pair.train.X[known], pair.train.y[known],
                         default_config(learner), schema_hash=pair.schema.digest())
        else:
            pool = load_dataset(data, **tokens)

        per_seed = []
        curves = {}
        for seed in range(seeds):
            config = EngineConfig(
                learner=default_config(learner, seed=seed),
                certainty_switch_threshold=threshold,
                undersampling=undersampling,
                presumptive_negatives=presumptive,
                stop_recall=stop,
                batch_size=batch,
                warm_start_model=warm,
            )
            result = run_simulation(pool, config, seed=seed)
            if result.state is None:
                raise click.ClickException("dataset has no actionable warnings to find")
            auc = metrics.session_auc(result.state, method=auc_method)
            per_seed.append(_curve_row(data.stem, f"active_{learner}",
                                       config.learner.kind, seed, result.curve, auc))
            curves[seed] = result.curve
            click.echo(
                f"seed {seed}: {len(result.curve.points)} labels, "
                f"recall {result.curve.final_recall:.3f}, "
                f"cost {result.curve.points[-1][0]:.3f}, auc {auc:.3f}"
            )
    except (WarnsiftError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc

    extra = {
        "auc_method": auc_method,
        "stop_recall": stop,
        "warm_start": train_path is not None,
        "engine": {
            "certainty_switch_threshold": threshold,
            "undersampling": undersampling,
            "presumptive_negatives": presumptive,
            "batch_size": batch,
        },
    }
    _write_run_outputs(out, data.stem, f"active_{learner}",
                       default_config(learner).kind, per_seed, extra)
    for seed, curve in curves.items():
        curve.write_csv(out / f"run_seed{seed}.csv")
    click.echo(f"wrote {out / 'summary.json'}")


@main.command("baseline")
@click.option("--mode", type=click.Choice(["random", "supervised"]), required=True)
@click.option("--data", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--train", "train_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="older version (required for supervised mode)")
@click.option("--learner", default="rf", type=_LEARNER_CHOICES, show_default=True)
@click.option("--seeds", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--out", type=click.Path(path_type=Path), required=True)
@_label_options
def baseline(mode: str, data: Path, train_path: Path | None, learner: str, seeds: int,
             out: Path, label_column: str, positive: str, negative: str, deleted: str) -> None:
    """Rank a labeled dataset without active learning."""
    tokens = dict(label_column=label_column, positive_token=positive,
                  negative_token=negative, deleted_token=deleted)
    try:
        per_seed = []
        curves = {}
        if mode == "random":
            pool = load_dataset(data, **tokens)
            method = "random"
            kind = "none"
            for seed in range(seeds):
                order = baselines.random_ranking(pool, seed)
                curve = metrics.curve_from_ranking(order, pool)
                ranks = {wid: len(order) - i for i, wid in enumerate(order)}
                auc = metrics.roc_auc([ranks[w] for w in pool.ids], pool.y)
                per_seed.append(_curve_row(data.stem, method, kind, seed, curve, auc))
                curves[seed] = curve
        else:
            if train_path is None:
                raise click.UsageError("supervised mode needs --train")
            pair = load_version_pair(train_path, data, **tokens)
            method = f"supervised_{learner}"
            kind = default_config(learner).kind
            for seed in range(seeds):
                result = baselines.supervised_run(pair, default_config(learner, seed=seed))
                per_seed.append(_curve_row(data.stem, method, kind, seed, result.curve, result.auc))
                curves[seed] = result.curve
        for row in per_seed:
            click.echo(f"seed {row['seed']}: auc {row['auc']:.3f}, "
                       f"cost@0.9 {row['cost_at_0.9']:.3f}")
    except (WarnsiftError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc

    _write_run_outputs(out, data.stem, method, kind, per_seed,
                       {"warm_start": train_path is not None})
    for seed, curve in curves.items():
        curve.write_csv(out / f"run_seed{seed}.csv")
    click.echo(f"wrote {out / 'summary.json'}")


def _fmt(x: float) -> str:
    return f"{x:.3f}"


@main.command("report")
@click.option("--runs", "run_dirs", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="write markdown here instead of stdout")
def report(run_dirs: tuple[Path, ...], out: Path | None) -> None:
    """Summarize one or more run directories as a markdown report."""
    docs = []
    for d in run_dirs:
        summary = d / "summary.json"
        if not summary.exists():
            raise click.ClickException(f"{d} has no summary.json")
        docs.append(json.loads(summary.read_text()))
    docs.sort(key=lambda doc: (doc["dataset"], doc["method"]))

    lines = ["# Warning triage benchmark", ""]
    auc_methods = {doc.get("auc_method") for doc in docs if doc.get("auc_method")}
    if auc_methods:
        named = ", ".join(sorted(auc_methods))
        lines += [f"Active-session AUC uses the `{named}` construction.", ""]

    lines += ["## Ranking quality (AUC, median over seeds)", "",
              "| dataset | method | median | IQR |",
              "| --- | --- | --- | --- |"]
    for doc in docs:
        m = doc["metrics"]["auc"]
        lines.append(f"| {doc['dataset']} | {doc['method']} | "
                     f"{_fmt(m['median'])} | {_fmt(m['iqr'])} |")

    lines += ["", "## Cost to reach recall thresholds (median over seeds)", "",
              "| dataset | method | " + " | ".join(f"{t:.2f}" for t in COST_THRESHOLDS) + " |",
              "| --- | --- | " + " | ".join("---" for _ in COST_THRESHOLDS) + " |"]
    for doc in docs:
        cells = " | ".join(_fmt(doc["metrics"][f"cost_at_{t}"]["median"]) for t in COST_THRESHOLDS)
        lines.append(f"| {doc['dataset']} | {doc['method']} | {cells} |")

    lines += ["", "## Recall at half cost (median over seeds)", "",
              "| dataset | method | recall |", "| --- | --- | --- |"]
    for doc in docs:
        m = doc["metrics"]["recall_at_cost_0.5"]
        lines.append(f"| {doc['dataset']} | {doc['method']} | {_fmt(m['median'])} |")
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        click.echo(f"wrote {out}")


@main.command("serve")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--checkpoint-dir", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8571, show_default=True)
def serve(data_dir: Path, checkpoint_dir: Path, host: str, port: int) -> None:
    """Run the labeling HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir, checkpoint_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
