"""Training losses returning the scalar value and its gradient w.r.t. predictions."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from errors import EmptyMask, ShapeMismatch

BCE_CLAMP = 1e-7


class LossResult(NamedTuple):
    value: float
    grad: np.ndarray


def _mask_of(
    pred: np.ndarray, target: np.ndarray, mask: np.ndarray | None
) -> np.ndarray:
    if pred.shape != target.shape:
        raise ShapeMismatch(f"prediction {pred.shape} vs target {target.shape}")
    if mask is None:
        return np.ones(pred.shape, dtype=bool)
    if mask.shape != pred.shape:
        raise ShapeMismatch(f"mask {mask.shape} vs prediction {pred.shape}")
    present = mask.astype(bool)
    if not present.any():
        raise EmptyMask("no labelled entries under the mask")
    return present


def loss_mse(
    pred: np.ndarray, target: np.ndarray, mask: np.ndarray | None = None
) -> LossResult:
    """Mean squared error over the entries present in ``mask`` (all by default)."""
    present = _mask_of(pred, target, mask)
    count = int(present.sum())
    diff = np.where(present, pred - np.where(present, target, 0.0), 0.0)
    value = float(np.sum(diff * diff) / count)
    return LossResult(value, (2.0 * diff / count).astype(pred.dtype))


def loss_bce_masked(
    pred: np.ndarray, target: np.ndarray, mask: np.ndarray | None = None
) -> LossResult:
    """
    Binary cross-entropy averaged over masked-in entries.

    Predictions are clamped to [1e-7, 1 - 1e-7]; missing targets may hold any
    value (NaN included) where the mask is off.
    """
    present = _mask_of(pred, target, mask)
    count = int(present.sum())
    p = np.clip(pred, BCE_CLAMP, 1.0 - BCE_CLAMP)
    t = np.where(present, target, 0.0)
    terms = np.where(present, t * np.log(p) + (1.0 - t) * np.log(1.0 - p), 0.0)
    value = float(-np.sum(terms) / count)
    grad = np.where(present, (p - t) / (p * (1.0 - p)), 0.0) / count
    return LossResult(value, grad.astype(pred.dtype))
