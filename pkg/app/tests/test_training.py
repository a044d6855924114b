"""Test early stopping and the fit loop."""

from collections.abc import Sequence

import numpy as np
from config import TrainConfig
from data_types.molecule import MolGraph
from harness.training import EarlyStopping, evaluation_loss, fit
from tensornet.layers import Dense, Head, ReLU, Sequential
from tensornet.model import Model, Segment, SegmentMap, freeze_bottom


class ArrayEncoder:
    """Serves rows of a fixed feature matrix."""

    modality = "array"

    def __init__(self, features: np.ndarray) -> None:
        self.features = features

    def check(self, mol: MolGraph, canonical: str) -> None:
        pass

    def bind(self, mols: Sequence[MolGraph], canonical: Sequence[str]) -> None:
        pass

    def batch(
        self, indices: Sequence[int], rng: np.random.Generator | None = None
    ) -> np.ndarray:
        return self.features[np.asarray(indices, dtype=np.int64)]


def regression_model(seed: int = 0) -> Model:
    model = Model(
        [Sequential([Dense(3, 8, init="he"), ReLU()]), Head(8, 1, "linear")],
        SegmentMap([Segment("body", 0, 1), Segment("head", 1, 2)]),
        (3,),
    )
    model.initialize(np.random.default_rng(seed))
    return model


def linear_problem() -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(7)
    x = rng.normal(size=(96, 3)).astype(np.float32)
    y = (x @ np.array([[1.0], [-2.0], [0.5]])).astype(np.float32)
    return x, y


def test_early_stopping_patience() -> None:
    stopper = EarlyStopping(patience=2)

    assert not stopper.update(1, 1.0)
    assert not stopper.update(2, 0.5)
    assert not stopper.update(3, 0.5)  # equal is not an improvement
    assert stopper.update(4, 0.7)
    assert stopper.best_epoch == 2
    assert stopper.best_loss == 0.5


def test_fit_reduces_validation_loss() -> None:
    x, y = linear_problem()
    model = regression_model()
    encoder = ArrayEncoder(x)
    train, validation = list(range(72)), list(range(72, 96))
    before = evaluation_loss(model, encoder, validation, y, "mse")

    history = fit(
        model,
        encoder,
        y,
        train,
        validation,
        "mse",
        TrainConfig(learning_rate=1e-2, batch_size=16, max_epochs=30, patience=30),
    )

    assert history.epochs_trained == 30
    assert history.best_val_loss < before
    assert history.to_frame().columns.tolist() == ["epoch", "train_loss", "val_loss"]


def test_fit_restores_best_epoch() -> None:
    x, y = linear_problem()
    model = regression_model()
    encoder = ArrayEncoder(x)
    validation = list(range(72, 96))

    history = fit(
        model,
        encoder,
        y,
        list(range(72)),
        validation,
        "mse",
        TrainConfig(learning_rate=5e-2, batch_size=8, max_epochs=40, patience=3),
    )

    best = min(record.val_loss for record in history.epochs)
    assert history.best_val_loss == best
    assert history.epochs[history.best_epoch - 1].val_loss == best
    restored = evaluation_loss(model, encoder, validation, y, "mse")
    assert np.isclose(restored, best, rtol=1e-5)


def test_fit_is_deterministic() -> None:
    x, y = linear_problem()
    config = TrainConfig(batch_size=16, max_epochs=5, patience=5, seed=3)
    runs = []
    for _ in range(2):
        model = regression_model()
        fit(model, ArrayEncoder(x), y, range(72), range(72, 96), "mse", config)
        runs.append([value.tobytes() for _, value in model.named_parameters()])

    assert runs[0] == runs[1]


def test_fit_leaves_frozen_body_alone() -> None:
    x, y = linear_problem()
    model = regression_model()
    freeze_bottom(model, 1)
    body = [v.copy() for n, v in model.named_parameters() if n.startswith("0.")]

    fit(
        model,
        ArrayEncoder(x),
        y,
        range(72),
        range(72, 96),
        "mse",
        TrainConfig(max_epochs=3, patience=3),
    )

    after = [v for n, v in model.named_parameters() if n.startswith("0.")]
    assert all(a.tobytes() == b.tobytes() for a, b in zip(after, body, strict=True))


def test_missing_targets_are_skipped() -> None:
    x, y = linear_problem()
    targets = y.copy()
    targets[:16] = np.nan
    model = regression_model()

    history = fit(
        model,
        ArrayEncoder(x),
        targets,
        range(16),
        range(72, 96),
        "mse",
        TrainConfig(batch_size=16, max_epochs=2, patience=2),
    )

    assert all(np.isnan(record.train_loss) for record in history.epochs)
    assert np.isnan(evaluation_loss(model, ArrayEncoder(x), range(16), targets, "mse"))
