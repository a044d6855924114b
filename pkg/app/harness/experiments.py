"""
Pre-training on descriptor labels, fine-tuning with segment freezing, the
freeze sweep and the pretrained-versus-random initialization comparison.
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from config import ExperimentConfig, HeadKind
from encoding.text import Vocab, build_vocab
from errors import ChemNetError, ModalityMismatch, TooLong, TooSmall
from harness.dataset import Dataset, Reject, TaskKind, build_dataset, write_rejects
from harness.encoders import ImageEncoder, TextEncoder, make_encoder
from harness.metrics import Metrics, evaluate_predictions, metric_name
from harness.splits import SplitPlan, make_split, oversample_minority
from harness.training import LossKind, TrainingHistory, evaluation_loss, fit
from labels.descriptors import compute_descriptors, label_matrix, resolve_names
from labels.normalization import NormStats, apply_normalizer, fit_normalizer
from log_tools import Logger
from models.factory import build_model, spec_for_experiment, spec_from_metadata
from sklearn.model_selection import train_test_split
from tensornet.model import HeadSpec, Model, freeze_bottom, replace_head
from tensornet.serialize import save_model
from utils.common import save_table

app_logger = Logger.get_app_logger()

MODEL_FILE = "model.chnt"
NORM_STATS_FILE = "norm_stats.json"
VOCAB_FILE = "vocab.txt"
HISTORY_FILE = "history.csv"
METRICS_FILE = "metrics.json"
REJECTS_FILE = "rejects.csv"


@dataclass
class PretrainResult:
    model: Model
    norm_stats: NormStats
    vocab: Vocab | None
    history: TrainingHistory
    baseline_val_loss: float
    train: list[int]
    validation: list[int]
    smiles: list[str]
    rejects: list[Reject] = field(default_factory=list)

    @property
    def val_loss(self) -> float:
        return self.history.best_val_loss


@dataclass
class FinetuneResult:
    metrics: Metrics
    histories: list[TrainingHistory]
    plan: SplitPlan
    models: list[Model]
    rejects: list[Reject] = field(default_factory=list)


def encoder_settings(config: ExperimentConfig) -> dict[str, Any]:
    return {
        "modality": config.modality,
        "image_size": config.image_size,
        "resolution": config.resolution,
        "sequence_length": config.sequence_length,
    }


def model_vocab(model: Model) -> Vocab | None:
    symbols = model.metadata.get("vocab")
    return Vocab(tuple(symbols)) if symbols else None


def encoder_for_model(model: Model) -> ImageEncoder | TextEncoder:
    """The input pipeline a model was built for, from its metadata."""
    meta = model.metadata
    return make_encoder(
        meta["modality"],
        meta["image_size"],
        meta["resolution"],
        meta["sequence_length"],
        model_vocab(model),
    )


def fresh_model(
    config: ExperimentConfig,
    n_outputs: int,
    head: HeadKind,
    vocab: Vocab | None = None,
    seed: int | None = None,
) -> Model:
    """Randomly initialized model for ``config`` with input metadata attached."""
    spec = spec_for_experiment(
        config, n_outputs, head, vocab.size if vocab is not None else None
    )
    model = build_model(
        spec,
        seed=config.train.seed if seed is None else seed,
        dtype=config.train.precision,
    )
    model.metadata.update(encoder_settings(config))
    model.metadata["vocab"] = list(vocab.symbols) if vocab is not None else None
    return model


def fresh_like(model: Model, seed: int) -> Model:
    """Same architecture and input metadata as ``model``, new random weights."""
    clone = build_model(
        spec_from_metadata(model.metadata), seed=seed, dtype=model.dtype.name
    )
    for key, value in model.metadata.items():
        clone.metadata.setdefault(key, value)
    return clone


def _holdout(n: int, fraction: float, seed: int) -> tuple[list[int], list[int]]:
    if n < 2:
        raise TooSmall(f"{n} molecules cannot be split into train and validation")
    train, validation = train_test_split(
        np.arange(n), test_size=max(1, round(n * fraction)), random_state=seed
    )
    return sorted(train.tolist()), sorted(validation.tolist())


@Logger.log
def pretrain(
    smiles: Sequence[str],
    config: ExperimentConfig,
    run_dir: str | Path | None = None,
) -> PretrainResult:
    """
    Train a model to predict min-max normalized descriptors of a corpus.

    Molecules that fail to parse, have no heavy atom or do not fit the
    encoder are rejected and counted. A ``test_fraction`` share of the corpus
    is held out for validation; normalization is fitted on the training part
    only. Image models see a fresh random rotation of every molecule each
    epoch. The best-validation parameters are kept.
    """
    names = resolve_names(config.descriptors)
    image_encoder = (
        None
        if config.modality == "text"
        else ImageEncoder(config.modality, config.image_size, config.resolution)
    )

    def validate(mol: Any, canonical: str) -> None:
        compute_descriptors(mol, names)
        if image_encoder is not None:
            image_encoder.check(mol, canonical)
        elif len(canonical) > config.sequence_length:
            raise TooLong(f"canonical SMILES longer than {config.sequence_length}")

    corpus = build_dataset(
        list(smiles),
        np.zeros((len(smiles), 0)),
        TaskKind.REGRESSION,
        [],
        validate=validate,
    )
    encoder: ImageEncoder | TextEncoder
    vocab: Vocab | None = None
    if image_encoder is None:
        vocab = build_vocab(corpus.canonical)
        encoder = TextEncoder(vocab, config.sequence_length)
    else:
        encoder = image_encoder
    labels = label_matrix(corpus.mols, names)
    train, validation = _holdout(len(corpus), config.test_fraction, config.train.seed)
    stats = fit_normalizer(labels[train], names)
    targets = apply_normalizer(labels, stats)
    encoder.bind(corpus.mols, corpus.canonical)

    model = fresh_model(config, len(names), "multitask-linear", vocab)
    model.metadata["descriptors"] = list(names)
    model.metadata["norm_stats"] = stats.model_dump()
    baseline = evaluation_loss(model, encoder, validation, targets, "mse")
    history = fit(
        model,
        encoder,
        targets,
        train,
        validation,
        "mse",
        config.train,
        augment=config.modality != "text",
        label="pretrain",
    )
    app_logger.info(
        "Pre-training validation MSE %.6g (untrained %.6g)",
        history.best_val_loss,
        baseline,
    )
    result = PretrainResult(
        model=model,
        norm_stats=stats,
        vocab=vocab,
        history=history,
        baseline_val_loss=baseline,
        train=train,
        validation=validation,
        smiles=corpus.canonical,
        rejects=corpus.rejects,
    )
    if run_dir is not None:
        write_pretrain_outputs(result, Path(run_dir))
    return result


def write_pretrain_outputs(result: PretrainResult, run_dir: Path) -> None:
    save_model(result.model, run_dir / MODEL_FILE)
    result.norm_stats.save(run_dir / NORM_STATS_FILE)
    if result.vocab is not None:
        result.vocab.save(run_dir / VOCAB_FILE)
    save_table(result.history.to_frame(), run_dir / HISTORY_FILE)
    write_rejects(run_dir / REJECTS_FILE, result.rejects)


def encodable_subset(
    dataset: Dataset, encoder: ImageEncoder | TextEncoder
) -> tuple[Dataset, list[Reject]]:
    """Records the encoder accepts, plus rejects for the rest."""
    keep: list[int] = []
    rejects: list[Reject] = []
    for i, (mol, canonical) in enumerate(
        zip(dataset.mols, dataset.canonical, strict=True)
    ):
        try:
            encoder.check(mol, canonical)
        except ChemNetError as err:
            rejects.append(
                Reject(i, dataset.ids[i], dataset.smiles[i], err.reason, str(err))
            )
            continue
        keep.append(i)
    if rejects:
        app_logger.warning("%d records cannot be encoded for this model", len(rejects))
    if len(keep) == len(dataset):
        return dataset, rejects
    return dataset.subset(keep), rejects


def task_head(task: TaskKind) -> tuple[HeadKind, LossKind]:
    if task is TaskKind.CLASSIFICATION:
        return "sigmoid", "bce"
    return "linear", "mse"


def _base_model(
    dataset: Dataset, config: ExperimentConfig, model: Model | None
) -> Model:
    if model is None:
        vocab = build_vocab(dataset.canonical) if config.modality == "text" else None
        head, _ = task_head(dataset.task)
        return fresh_model(config, dataset.n_tasks, head, vocab)
    modality = model.metadata.get("modality")
    if modality != config.modality:
        err_msg = f"model takes {modality} input but the run encodes {config.modality}"
        app_logger.error(err_msg)
        raise ModalityMismatch(err_msg)
    return model


@Logger.log
def finetune(
    dataset: Dataset,
    config: ExperimentConfig,
    model: Model | None = None,
    freeze_k: int | None = None,
    plan: SplitPlan | None = None,
    run_dir: str | Path | None = None,
    label: str = "finetune",
) -> FinetuneResult:
    """
    Cross-validated fine-tuning.

    Each fold starts from a copy of ``model`` (or a fresh model when None)
    with a new task head, freezes all but the top ``freeze_k`` segments
    (``None`` fine-tunes everything) and trains with early stopping. The
    metric is reported on each validation fold and on the held-out test set.

    Raises:
        ModalityMismatch: the model was built for another input modality.
        IndexOutOfRange: ``freeze_k`` is outside ``0..n_segments``.
    """
    base = _base_model(dataset, config, model)
    encoder = encoder_for_model(base)
    data, rejects = encodable_subset(dataset, encoder)
    encoder.bind(data.mols, data.canonical)
    if plan is None:
        plan = make_split(
            data,
            config.test_fraction,
            config.folds,
            config.train.seed,
            config.stratify,
        )
    head, loss = task_head(data.task)
    n_finetuned = len(base.segments) if freeze_k is None else freeze_k
    single_task_binary = data.task is TaskKind.CLASSIFICATION and data.n_tasks == 1
    augment = base.metadata["modality"] != "text"
    test = np.asarray(plan.test, dtype=np.int64)

    def run_fold(index: int) -> tuple[Model, TrainingHistory, float, float]:
        fold = plan.folds[index]
        fold_model = base.clone()
        fold_model.optimizer_state = {}
        replace_head(
            fold_model,
            HeadSpec(data.n_tasks, head),
            np.random.default_rng(config.train.seed + index),
        )
        freeze_bottom(fold_model, n_finetuned)
        train = fold.train
        if single_task_binary:
            train = oversample_minority(train, data.labels[:, 0])
        history = fit(
            fold_model,
            encoder,
            data.labels,
            train,
            fold.validation,
            loss,
            config.train.model_copy(update={"seed": config.train.seed + index}),
            augment=augment,
            label=f"{label} fold {index}",
        )
        validation = np.asarray(fold.validation, dtype=np.int64)
        val_metric = evaluate_predictions(
            fold_model.predict(encoder.batch(validation)),
            data.labels[validation],
            data.task,
        )
        test_metric = evaluate_predictions(
            fold_model.predict(encoder.batch(test)), data.labels[test], data.task
        )
        return fold_model, history, val_metric, test_metric

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run_fold, range(plan.k)))
    else:
        outcomes = [run_fold(index) for index in range(plan.k)]

    histories = [outcome[1] for outcome in outcomes]
    metrics = Metrics.from_folds(
        metric_name(data.task),
        per_fold=[outcome[2] for outcome in outcomes],
        test_per_fold=[outcome[3] for outcome in outcomes],
        epochs_trained=[h.epochs_trained for h in histories],
        best_epochs=[h.best_epoch for h in histories],
        best_val_loss=[h.best_val_loss for h in histories],
        rejects=len(dataset.rejects) + len(rejects),
    )
    app_logger.info(
        "%s: mean validation %s %.4f, mean test %.4f",
        label,
        metrics.metric,
        metrics.mean,
        metrics.test_mean,
    )
    result = FinetuneResult(
        metrics=metrics,
        histories=histories,
        plan=plan,
        models=[outcome[0] for outcome in outcomes],
        rejects=[*dataset.rejects, *rejects],
    )
    if run_dir is not None:
        write_finetune_outputs(result, Path(run_dir))
    return result


def history_table(histories: Sequence[TrainingHistory]) -> pd.DataFrame:
    frames = [
        history.to_frame().assign(fold=index) for index, history in enumerate(histories)
    ]
    columns = ["fold", "epoch", "train_loss", "val_loss"]
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)[columns]


def write_finetune_outputs(result: FinetuneResult, run_dir: Path) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    for index, model in enumerate(result.models):
        save_model(model, run_dir / f"fold_{index}.chnt")
    (run_dir / METRICS_FILE).write_text(
        result.metrics.model_dump_json(indent=2), encoding="utf-8"
    )
    (run_dir / "split.json").write_text(
        result.plan.model_dump_json(indent=2), encoding="utf-8"
    )
    save_table(history_table(result.histories), run_dir / HISTORY_FILE)
    write_rejects(run_dir / REJECTS_FILE, result.rejects)


def _summary_row(metrics: Metrics) -> dict[str, Any]:
    return {
        "metric": metrics.metric,
        "mean": metrics.mean,
        "test_mean": metrics.test_mean,
        "mean_best_epoch": metrics.mean_best_epoch,
    }


@Logger.log
def freeze_sweep(
    model: Model,
    dataset: Dataset,
    config: ExperimentConfig,
    plan: SplitPlan | None = None,
) -> pd.DataFrame:
    """
    Fine-tune once per ``freeze_k`` in ``0..n_segments`` on a shared split.

    Returns one row per ``freeze_k`` (number of segments fine-tuned, counted
    from the head) with the mean validation and test metric.
    """
    rows = []
    for freeze_k in range(len(model.segments) + 1):
        result = finetune(
            dataset,
            config,
            model=model,
            freeze_k=freeze_k,
            plan=plan,
            label=f"sweep k={freeze_k}",
        )
        plan = result.plan
        rows.append({"freeze_k": freeze_k, **_summary_row(result.metrics)})
    return pd.DataFrame(rows)


@Logger.log
def compare_initializations(
    model: Model,
    dataset: Dataset,
    config: ExperimentConfig,
    seeds: Sequence[int],
    freeze_k: int | None = None,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """
    Fine-tune from ``model`` and from a random model of the same architecture
    for each seed (same split and training seed for both).

    Returns the per-seed table and a per-initialization summary.
    """
    rows = []
    for seed in seeds:
        seeded = config.model_copy(
            update={"train": config.train.model_copy(update={"seed": seed})}
        )
        starts = {"pretrained": model, "random": fresh_like(model, seed)}
        plan = None
        for init, start in starts.items():
            result = finetune(
                dataset,
                seeded,
                model=start,
                freeze_k=freeze_k,
                plan=plan,
                label=f"{init} seed {seed}",
            )
            plan = result.plan
            rows.append({"seed": seed, "init": init, **_summary_row(result.metrics)})
    table = pd.DataFrame(rows)
    summary = (
        table.groupby("init", sort=False)[["mean", "test_mean", "mean_best_epoch"]]
        .mean()
        .reset_index()
    )
    return table, summary


def evaluate_model(model: Model, dataset: Dataset) -> float:
    """Metric of ``model`` on every encodable record of ``dataset``."""
    encoder = encoder_for_model(model)
    data, _ = encodable_subset(dataset, encoder)
    encoder.bind(data.mols, data.canonical)
    pred = model.predict(encoder.batch(range(len(data))))
    return evaluate_predictions(pred, data.labels, data.task)
