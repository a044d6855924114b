"""Mini-batch RMSprop training with early stopping on the validation loss."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Literal

import numpy as np
import pandas as pd
from config import TrainConfig
from errors import EmptyMask
from harness.encoders import Encoder
from log_tools import Logger
from pydantic import BaseModel
from tensornet.losses import LossResult, loss_bce_masked, loss_mse
from tensornet.model import Model
from tensornet.optim import rmsprop_step

LossKind = Literal["mse", "bce"]

app_logger = Logger.get_app_logger()


def compute_loss(
    kind: LossKind, pred: np.ndarray, target: np.ndarray, mask: np.ndarray
) -> LossResult:
    if kind == "bce":
        return loss_bce_masked(pred, target, mask)
    return loss_mse(pred, target, mask)


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    val_loss: float


class TrainingHistory(BaseModel):
    epochs: list[EpochRecord] = []
    best_epoch: int = 0
    best_val_loss: float = float("inf")
    stopped_early: bool = False

    @property
    def epochs_trained(self) -> int:
        return len(self.epochs)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [record.model_dump() for record in self.epochs],
            columns=["epoch", "train_loss", "val_loss"],
        )


class EarlyStopping:
    """Stop once ``patience`` epochs pass without a strictly lower loss."""

    def __init__(self, patience: int) -> None:
        self.patience = patience
        self.best_epoch = 0
        self.best_loss = float("inf")

    def update(self, epoch: int, loss: float) -> bool:
        """Record an epoch; returns True when training should stop."""
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
        return epoch - self.best_epoch >= self.patience


def _snapshot(model: Model) -> dict[str, np.ndarray]:
    return {name: value.copy() for name, value in model.named_parameters()}


def _restore(model: Model, snapshot: dict[str, np.ndarray]) -> None:
    for name, value in model.named_parameters():
        value[...] = snapshot[name]


def evaluation_loss(
    model: Model,
    encoder: Encoder,
    indices: Sequence[int],
    targets: np.ndarray,
    kind: LossKind,
    batch_size: int = 64,
) -> float:
    """Loss over ``indices`` without augmentation; NaN when nothing is labelled."""
    picked = np.asarray(indices, dtype=np.int64)
    pred = model.predict(encoder.batch(picked), batch_size=batch_size)
    target = targets[picked]
    try:
        return compute_loss(kind, pred, target, ~np.isnan(target)).value
    except EmptyMask:
        return float("nan")


def train_step(
    model: Model,
    x: np.ndarray,
    target: np.ndarray,
    kind: LossKind,
    config: TrainConfig,
) -> float:
    """One forward/backward/RMSprop update; returns the batch loss."""
    pred = model.forward(x)
    result = compute_loss(kind, pred, target, ~np.isnan(target))
    rmsprop_step(model, model.backward(result.grad), config)
    return result.value


def fit(
    model: Model,
    encoder: Encoder,
    targets: np.ndarray,
    train: Sequence[int],
    validation: Sequence[int],
    kind: LossKind,
    config: TrainConfig,
    augment: bool = False,
    label: str = "train",
) -> TrainingHistory:
    """
    Train until ``max_epochs`` or early stopping, then restore the parameters
    of the best validation epoch.

    Batches are drawn from a seeded permutation of ``train`` each epoch;
    batches with no labelled entry are skipped. With ``augment`` the encoder
    gets the same generator, so image rotations are seeded too.
    """
    rng = np.random.default_rng(config.seed)
    train_idx = np.asarray(train, dtype=np.int64)
    stopper = EarlyStopping(config.patience)
    history = TrainingHistory()
    best = _snapshot(model)

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(train_idx)
        total, count = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            target = targets[batch]
            if np.isnan(target).all():
                continue
            x = encoder.batch(batch, rng if augment else None)
            total += train_step(model, x, target, kind, config) * len(batch)
            count += len(batch)
        train_loss = total / count if count else float("nan")
        val_loss = evaluation_loss(
            model, encoder, validation, targets, kind, config.batch_size
        )
        history.epochs.append(
            EpochRecord(epoch=epoch, train_loss=train_loss, val_loss=val_loss)
        )
        app_logger.info(
            "%s epoch %d: train %.6g, validation %.6g",
            label,
            epoch,
            train_loss,
            val_loss,
        )
        if val_loss < stopper.best_loss:
            best = _snapshot(model)
        if stopper.update(epoch, val_loss):
            history.stopped_early = epoch < config.max_epochs
            app_logger.info(
                "%s stopped at epoch %d; best epoch %d",
                label,
                epoch,
                stopper.best_epoch,
            )
            break

    _restore(model, best)
    history.best_epoch = stopper.best_epoch
    history.best_val_loss = stopper.best_loss
    return history
