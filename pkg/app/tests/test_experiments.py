"""Pre-training, fine-tuning, the freeze sweep and the initialization comparison."""

import json
from functools import cache
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from config import ExperimentConfig, TrainConfig, load_model_presets
from encoding.text import PAD
from errors import ModalityMismatch
from harness.corpus import generate_corpus
from harness.dataset import Dataset
from harness.experiments import (
    compare_initializations,
    evaluate_model,
    finetune,
    freeze_sweep,
    fresh_like,
    pretrain,
)
from harness.report import learning_curves, summarize_runs
from harness.toy_tasks import make_toy_dataset
from labels.descriptors import resolve_names
from tensornet.model import Model
from tensornet.serialize import load_model


def text_config(**train: int) -> ExperimentConfig:
    settings = {"batch_size": 16, "max_epochs": 2, "patience": 2, **train}
    return ExperimentConfig(
        modality="text",
        hidden=4,
        sequence_length=64,
        descriptors=["wiener", "ring_count", "molecular_weight"],
        folds=2,
        train=TrainConfig(**settings),
    )


def image_config() -> ExperimentConfig:
    return ExperimentConfig(
        modality="image-engd",
        image_size=24,
        resolution=1.0,
        T=1,
        F=4,
        descriptors=["wiener", "ring_count"],
        folds=2,
        train=TrainConfig(batch_size=8, max_epochs=1, patience=1),
    )


@pytest.fixture(scope="module")
def corpus() -> list[str]:
    return generate_corpus(48, seed=0, max_heavy_atoms=16)


def test_pretrain_text(corpus: list[str], tmp_path: Path) -> None:
    result = pretrain(corpus, text_config(), run_dir=tmp_path)

    assert result.model.metadata["modality"] == "text"
    assert result.model.metadata["descriptors"] == [
        "molecular_weight",
        "ring_count",
        "wiener",
    ]
    assert result.vocab is not None and result.vocab.symbols[0] == PAD
    assert len(result.train) + len(result.validation) == len(result.smiles)
    assert np.isfinite(result.val_loss)
    for name in ("model.chnt", "norm_stats.json", "vocab.txt", "history.csv"):
        assert (tmp_path / name).exists()
    loaded = load_model(tmp_path / "model.chnt")
    assert loaded.metadata["vocab"] == list(result.vocab.symbols)


def test_pretrain_image(corpus: list[str]) -> None:
    result = pretrain(corpus[:24], image_config())

    assert result.vocab is None
    assert result.model.input_shape == (24, 24, 4)
    assert result.model.output_shape == (2,)
    assert result.history.epochs_trained == 1


def test_finetune_from_pretrained(corpus: list[str], tmp_path: Path) -> None:
    config = text_config()
    pretrained = pretrain(corpus, config).model
    dataset = make_toy_dataset(corpus, "heteroatom_fraction")

    result = finetune(dataset, config, model=pretrained, freeze_k=1, run_dir=tmp_path)

    assert result.metrics.metric == "rmse"
    assert len(result.metrics.per_fold) == 2
    assert all(np.isfinite(result.metrics.per_fold))
    # the body is shared with the pre-trained model when only the head trains
    body = [v for n, v in pretrained.named_parameters() if n[0] in "01"]
    tuned = [v for n, v in result.models[0].named_parameters() if n[0] in "01"]
    assert all(a.tobytes() == b.tobytes() for a, b in zip(body, tuned, strict=True))
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["metric"] == "rmse"
    assert (tmp_path / "fold_1.chnt").exists()


def test_finetune_modality_mismatch(corpus: list[str]) -> None:
    model = pretrain(corpus, text_config()).model
    dataset = make_toy_dataset(corpus, "hydroxyl")

    with pytest.raises(ModalityMismatch):
        finetune(dataset, image_config(), model=model)


def test_sweep_and_compare(corpus: list[str]) -> None:
    config = text_config(max_epochs=1, patience=1)
    model = pretrain(corpus, config).model
    dataset = make_toy_dataset(corpus, "heteroatom_fraction")

    sweep = freeze_sweep(model, dataset, config)
    table, summary = compare_initializations(model, dataset, config, seeds=[0, 1])

    assert sweep["freeze_k"].tolist() == [0, 1, 2, 3]
    assert table["init"].tolist() == ["pretrained", "random"] * 2
    assert summary["init"].tolist() == ["pretrained", "random"]
    assert evaluate_model(model, dataset) >= 0.0


def test_fresh_like_keeps_architecture(corpus: list[str]) -> None:
    model = pretrain(corpus, text_config()).model

    clone = fresh_like(model, seed=9)

    assert clone.parameter_count() == model.parameter_count()
    assert clone.metadata["vocab"] == model.metadata["vocab"]
    assert any(
        a.tobytes() != b.tobytes()
        for (_, a), (_, b) in zip(
            clone.named_parameters(), model.named_parameters(), strict=True
        )
    )


def test_report_collects_runs(corpus: list[str], tmp_path: Path) -> None:
    config = text_config()
    dataset = make_toy_dataset(corpus, "heteroatom_fraction")
    for name in ("a", "b"):
        finetune(dataset, config, run_dir=tmp_path / name)

    summary = summarize_runs([tmp_path / "a", tmp_path / "b"])
    curves = learning_curves([tmp_path / "a"])

    assert len(summary) == 2
    assert set(curves.columns) >= {"fold", "epoch", "val_loss"}


def test_presets_build() -> None:
    presets = load_model_presets()

    assert {"T3_F16", "T2_F8", "SMILES2vec"} <= set(presets)
    assert presets["T2_F8"].image_size == 40


@pytest.mark.slow
def test_pretraining_beats_untrained_model() -> None:
    corpus = generate_corpus(400, seed=0, max_heavy_atoms=20)
    config = ExperimentConfig(
        modality="text",
        hidden=16,
        sequence_length=80,
        train=TrainConfig(learning_rate=3e-3, max_epochs=20, patience=5),
    )

    result = pretrain(corpus, config)

    assert result.val_loss < result.baseline_val_loss


TRANSFER_SEEDS = range(5)


def _seeded(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    return config.model_copy(
        update={"train": config.train.model_copy(update={"seed": seed})}
    )


def _transfer_config(preset: str, train: TrainConfig) -> ExperimentConfig:
    base = ExperimentConfig(descriptors=list(resolve_names(10)), folds=3, train=train)
    return base.apply_preset(load_model_presets()[preset])


@cache
def _pretrained(preset: str) -> Model:
    corpus = generate_corpus(2000, seed=0)
    config = _transfer_config(preset, TrainConfig(max_epochs=10, patience=3))
    return pretrain(corpus, config).model


@cache
def _hydroxyl_dataset() -> Dataset:
    smiles = generate_corpus(400, seed=1, include_seed_corpus=False)
    return make_toy_dataset(smiles, "hydroxyl")


@pytest.mark.slow
@pytest.mark.parametrize("preset", ["T2_F8", "SMILES2vec_small"])
def test_pretrained_start_beats_random_start(preset: str) -> None:
    config = _transfer_config(preset, TrainConfig(max_epochs=30, patience=8))

    _, summary = compare_initializations(
        _pretrained(preset), _hydroxyl_dataset(), config, seeds=TRANSFER_SEEDS
    )

    means = summary.set_index("init")
    assert means.loc["pretrained", "mean"] >= means.loc["random", "mean"]
    assert (
        means.loc["pretrained", "mean_best_epoch"]
        <= means.loc["random", "mean_best_epoch"]
    )


@pytest.mark.slow
def test_fine_tuning_more_segments_helps() -> None:
    model = _pretrained("SMILES2vec_small")
    config = _transfer_config(
        "SMILES2vec_small", TrainConfig(max_epochs=30, patience=8)
    )

    sweeps = [
        freeze_sweep(model, _hydroxyl_dataset(), _seeded(config, seed))
        for seed in TRANSFER_SEEDS
    ]

    n_segments = len(model.segments)
    assert all(len(sweep) == n_segments + 1 for sweep in sweeps)
    mean_auc = pd.concat(sweeps).groupby("freeze_k")["mean"].mean()
    assert mean_auc[n_segments] > mean_auc[1]
