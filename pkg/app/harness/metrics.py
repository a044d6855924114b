"""Evaluation metrics: rank-based ROC AUC and RMSE."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from errors import OneClassOnly
from harness.dataset import TaskKind
from pydantic import BaseModel
from scipy.stats import rankdata


Vector = np.ndarray | Sequence[float]


def roc_auc(scores: Vector, labels: Vector) -> float:
    """
    Mann-Whitney AUC with average ranks for tied scores.

    Raises:
        OneClassOnly: labels hold only positives or only negatives.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("AUC needs both classes")
    ranks = rankdata(s, method="average")
    rank_sum = float(np.sum(ranks[y == 1]))
    return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def multitask_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """
    Unweighted mean AUC over tasks; NaN labels are excluded per task and
    tasks without both classes are skipped.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(len(scores), -1)
    y = np.asarray(labels, dtype=np.float64).reshape(len(labels), -1)
    values = []
    for task in range(y.shape[1]):
        present = ~np.isnan(y[:, task])
        try:
            values.append(roc_auc(s[present, task], y[present, task]))
        except OneClassOnly:
            continue
    if not values:
        raise OneClassOnly("no task has both classes present")
    return sum(values) / len(values)


def rmse(pred: Vector, target: Vector) -> float:
    p = np.asarray(pred, dtype=np.float64).ravel()
    t = np.asarray(target, dtype=np.float64).ravel()
    if p.shape != t.shape or p.size == 0:
        raise ValueError("rmse needs two equal-length, non-empty vectors")
    return math.sqrt(float(np.mean((p - t) ** 2)))


def metric_name(task: TaskKind) -> str:
    return "auc" if task is TaskKind.CLASSIFICATION else "rmse"


def higher_is_better(metric: str) -> bool:
    return metric == "auc"


def evaluate_predictions(pred: np.ndarray, labels: np.ndarray, task: TaskKind) -> float:
    """AUC or RMSE over the labelled entries of ``labels``."""
    if task is TaskKind.CLASSIFICATION:
        return multitask_auc(pred, labels)
    present = ~np.isnan(labels)
    return rmse(np.asarray(pred).reshape(labels.shape)[present], labels[present])


def mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else float("nan")


class Metrics(BaseModel):
    """Per-fold results of one fine-tuning run."""

    metric: str
    per_fold: list[float]
    mean: float
    test_per_fold: list[float]
    test_mean: float
    epochs_trained: list[int]
    best_epochs: list[int]
    best_val_loss: list[float]
    rejects: int = 0

    @classmethod
    def from_folds(
        cls,
        metric: str,
        per_fold: list[float],
        test_per_fold: list[float],
        epochs_trained: list[int],
        best_epochs: list[int],
        best_val_loss: list[float],
        rejects: int = 0,
    ) -> Metrics:
        return cls(
            metric=metric,
            per_fold=per_fold,
            mean=mean(per_fold),
            test_per_fold=test_per_fold,
            test_mean=mean(test_per_fold),
            epochs_trained=epochs_trained,
            best_epochs=best_epochs,
            best_val_loss=best_val_loss,
            rejects=rejects,
        )

    @property
    def mean_best_epoch(self) -> float:
        return mean([float(e) for e in self.best_epochs])
