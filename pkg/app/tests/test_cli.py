"""Test the command-line entry point."""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
import cli
from cli import build_parser, experiment_config, main
from config import TrainConfig
from harness.manifest import RunManifest
from imaging.dump import read_tensor_dump
from labels.descriptors import DESCRIPTOR_NAMES


@pytest.fixture
def smi_file(tmp_path: Path) -> Path:
    path = tmp_path / "input.smi"
    path.write_text("CCO ethanol\nc1ccccc1 benzene\nC(C broken\n")
    return path


def test_descriptors_command(smi_file: Path, tmp_path: Path) -> None:
    out, rejects = tmp_path / "labels.csv", tmp_path / "rejects.csv"

    code = main(
        ["descriptors", "--input", str(smi_file), "--output", str(out)]
        + ["--descriptors", "3", "--rejects", str(rejects)]
    )

    assert code == 0
    frame = pd.read_csv(out)
    assert frame.columns.tolist() == ["smiles", *DESCRIPTOR_NAMES[:3]]
    assert len(frame) == 2
    assert pd.read_csv(rejects)["reason"].tolist() == ["SyntaxError"]


def test_descriptors_stats(tmp_path: Path) -> None:
    stats = tmp_path / "stats.json"

    code = main(
        ["descriptors", "--smiles", "CCO", "--output", str(tmp_path / "x.csv")]
        + ["--descriptors", "wiener,ring_count", "--stats", str(stats)]
    )

    assert code == 0
    assert json.loads(stats.read_text())["names"] == ["ring_count", "wiener"]


def test_render_command(tmp_path: Path) -> None:
    out = tmp_path / "ethanol.dump"

    code = main(
        ["render", "--smiles", "CCO", "--scheme", "engd"]
        + ["--image-size", "20", "--resolution", "0.5", "--output", str(out)]
    )

    assert code == 0
    image = read_tensor_dump(out)
    assert image.shape == (20, 20, 4)
    assert np.count_nonzero(image.sum(axis=2)) >= 3


def test_encode_command(tmp_path: Path) -> None:
    out = tmp_path / "encoded.dump"

    code = main(["encode", "--smiles", "OCC", "--length", "7", "--output", str(out)])

    assert code == 0
    encoded = read_tensor_dump(out)[:, :, 0]
    assert encoded.shape == (7, 3)
    assert encoded.sum(axis=1).tolist() == [1.0] * 7
    assert encoded[[0, 1, 5, 6], 0].tolist() == [1.0, 1.0, 1.0, 1.0]


def test_data_error_exit_code(tmp_path: Path) -> None:
    out = tmp_path / "bad.dump"

    assert main(["render", "--smiles", "C(C", "--output", str(out)]) == 2
    assert not out.exists()


def test_model_error_exit_code(tmp_path: Path) -> None:
    code = main(
        ["finetune", "--toy-task", "heteroatom_fraction", "--generate", "24"]
        + ["--modality", "text", "--hidden", "2", "--max-epochs", "1", "--folds", "2"]
        + ["--freeze-k", "9", "--seed", "0", "--out", str(tmp_path / "run")]
    )

    assert code == 3


def test_usage_errors_exit_one(tmp_path: Path) -> None:
    with pytest.raises(SystemExit) as info:
        main(["render", "--smiles", "CCO"])
    assert info.value.code == 1

    with pytest.raises(SystemExit) as info:
        main(["pretrain", "--generate", "10"])
    assert info.value.code == 1

    code = main(["pretrain", "--generate", "10", "--seed", "0", "--preset", "nope"])
    assert code == 1


def test_corpus_and_split(tmp_path: Path) -> None:
    corpus = tmp_path / "corpus.smi"
    plan = tmp_path / "plan.json"

    assert main(["corpus", "--n", "30", "--seed", "1", "--output", str(corpus)]) == 0
    code = main(
        ["split", "--toy-task", "hydroxyl", "--corpus", str(corpus)]
        + ["--folds", "3", "--seed", "4", "--output", str(plan)]
    )

    assert code == 0
    assert len(corpus.read_text().splitlines()) == 30
    data = json.loads(plan.read_text())
    assert len(data["folds"]) == 3
    assert data["seed"] == 4


def test_experiment_config_layers(tmp_path: Path) -> None:
    config_file = tmp_path / "config.json"
    config_file.write_text(json.dumps({"folds": 3, "train": {"batch_size": 8}}))
    args = build_parser().parse_args(
        ["finetune", "--toy-task", "hydroxyl", "--generate", "10", "--seed", "5"]
        + ["--config", str(config_file), "--preset", "T2_F8", "--max-epochs", "4"]
    )

    config = experiment_config(args, TrainConfig.finetune_defaults())

    assert config.folds == 3
    assert config.image_size == 40 and config.T == 2
    assert config.train.batch_size == 8
    assert config.train.max_epochs == 4
    assert config.train.patience == 4
    assert config.train.seed == 5


def test_bad_settings_exit_one(tmp_path: Path) -> None:
    run = ["--seed", "0", "--out", str(tmp_path / "run")]

    assert main(["pretrain", "--generate", "10", "--folds", "1", *run]) == 1
    assert main(["finetune", "--toy-task", "hydroxyl", *run]) == 1
    code = main(
        ["split", "--toy-task", "hydroxyl", "--generate", "10", "--folds", "1"]
        + ["--seed", "0", "--output", str(tmp_path / "plan.json")]
    )
    assert code == 1


def test_internal_faults_are_not_usage_errors(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    def broken(smiles: str) -> None:
        raise ValueError("bug")

    monkeypatch.setattr(cli, "prepare_molecule", broken)

    with pytest.raises(ValueError):
        main(["render", "--smiles", "CCO", "--output", str(tmp_path / "x.dump")])


def _pretrain_then_finetune(out: Path) -> tuple[RunManifest, RunManifest, str]:
    shared = ["--hidden", "4", "--sequence-length", "100", "--max-epochs", "2"]
    shared += ["--folds", "2", "--seed", "3"]
    assert (
        main(
            ["pretrain", "--generate", "40", "--modality", "text", "--descriptors", "3"]
            + shared
            + ["--out", str(out / "pretrain")]
        )
        == 0
    )
    assert (
        main(
            ["finetune", "--model", str(out / "pretrain" / "model.chnt")]
            + ["--toy-task", "heteroatom_fraction", "--generate", "40"]
            + shared
            + ["--out", str(out / "finetune")]
        )
        == 0
    )
    metrics = (out / "finetune" / "metrics.json").read_text()
    pretrained = RunManifest.load(out / "pretrain")
    tuned = RunManifest.load(out / "finetune")
    return pretrained, tuned, metrics


def test_repeated_runs_are_identical(tmp_path: Path) -> None:
    first = _pretrain_then_finetune(tmp_path / "a")
    second = _pretrain_then_finetune(tmp_path / "b")

    assert first[0].determinism_fields() == second[0].determinism_fields()
    assert first[1].determinism_fields() == second[1].determinism_fields()
    assert first[2] == second[2]
    assert first[0].results["model_sha256"] == first[1].results["pretrained_sha256"]
    assert len(first[1].results["fold_sha256"]) == 2
