"""Collect run outputs into plot-ready tables."""

from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
from harness.experiments import HISTORY_FILE, METRICS_FILE
from harness.manifest import MANIFEST_FILE, RunManifest


def summarize_runs(run_dirs: Sequence[str | Path]) -> pd.DataFrame:
    """One row per run directory: command, seeds, metric means, reject total."""
    rows = []
    for run_dir in map(Path, run_dirs):
        row: dict[str, object] = {"run": run_dir.name}
        if (run_dir / MANIFEST_FILE).exists():
            manifest = RunManifest.load(run_dir)
            row["command"] = manifest.command
            row["seeds"] = " ".join(str(seed) for seed in manifest.seeds)
            row["rejects"] = sum(manifest.reject_counts.values())
            row.update(
                {
                    key: value
                    for key, value in manifest.results.items()
                    if isinstance(value, int | float | str)
                }
            )
        metrics_path = run_dir / METRICS_FILE
        if metrics_path.exists():
            metrics = json.loads(metrics_path.read_text(encoding="utf-8"))
            for key in ("metric", "mean", "test_mean"):
                row[key] = metrics.get(key)
        rows.append(row)
    return pd.DataFrame(rows)


def learning_curves(run_dirs: Sequence[str | Path]) -> pd.DataFrame:
    """Per-epoch losses of every run, stacked with a ``run`` column."""
    frames = []
    for run_dir in map(Path, run_dirs):
        path = run_dir / HISTORY_FILE
        if path.exists():
            frames.append(pd.read_csv(path).assign(run=run_dir.name))
    if not frames:
        return pd.DataFrame(columns=["run", "epoch", "train_loss", "val_loss"])
    table = pd.concat(frames, ignore_index=True)
    return table[["run", *[c for c in table.columns if c != "run"]]]
