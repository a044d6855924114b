"""Min-max normalization of descriptor labels."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from errors import EmptyDataset, NonFiniteInput, RegistryMismatch
from labels.descriptors import REGISTRY_VERSION, DescriptorVector, resolve_names
from pydantic import BaseModel, model_validator


class NormStats(BaseModel):
    """Column-wise minima and maxima of a fitting corpus."""

    names: list[str]
    minimum: list[float]
    maximum: list[float]
    registry_version: str = REGISTRY_VERSION

    @model_validator(mode="after")
    def _check(self) -> NormStats:
        if not len(self.names) == len(self.minimum) == len(self.maximum):
            raise ValueError("names, minimum and maximum must have equal length")
        if any(hi < lo for lo, hi in zip(self.minimum, self.maximum, strict=True)):
            raise ValueError("maximum must be >= minimum for every descriptor")
        return self

    @property
    def width(self) -> int:
        return len(self.names)

    def save(self, path: str | Path) -> Path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return out

    @classmethod
    def load(cls, path: str | Path) -> NormStats:
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def fit_normalizer(
    matrix: np.ndarray,
    names: list[str] | tuple[str, ...] | None = None,
    registry_version: str = REGISTRY_VERSION,
) -> NormStats:
    """
    Fit per-column (min, max) over an N x D label matrix.

    Raises:
        EmptyDataset: no rows.
        NonFiniteInput: the matrix contains NaN or infinity.
    """
    values = np.asarray(matrix, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] == 0:
        raise EmptyDataset("cannot fit normalization on an empty label matrix")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("label matrix contains non-finite values")
    selected = list(names) if names is not None else list(resolve_names(None))
    if len(selected) != values.shape[1]:
        raise RegistryMismatch(
            f"{values.shape[1]} label columns but {len(selected)} descriptor names"
        )
    return NormStats(
        names=selected,
        minimum=values.min(axis=0).tolist(),
        maximum=values.max(axis=0).tolist(),
        registry_version=registry_version,
    )


def _check_compatible(
    values: np.ndarray | DescriptorVector, stats: NormStats
) -> np.ndarray:
    if isinstance(values, DescriptorVector):
        if values.registry_version != stats.registry_version:
            raise RegistryMismatch(
                f"vector from {values.registry_version}, stats from"
                f" {stats.registry_version}"
            )
        if list(values.names) != stats.names:
            raise RegistryMismatch("vector and stats select different descriptors")
        values = values.values
    array = np.asarray(values, dtype=np.float64)
    if array.shape[-1] != stats.width:
        raise RegistryMismatch(
            f"expected {stats.width} descriptor columns, got {array.shape[-1]}"
        )
    return array


def apply_normalizer(
    values: np.ndarray | DescriptorVector, stats: NormStats
) -> np.ndarray:
    """
    Scale to [0, 1]: ``(x - min) / (max - min)``, clamped; constant columns map to 0.

    Accepts one vector or a matrix of row vectors.
    """
    array = _check_compatible(values, stats)
    low = np.array(stats.minimum)
    span = np.array(stats.maximum) - low
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (array - low) / safe, 0.0)
    return np.clip(scaled, 0.0, 1.0)


def invert_normalizer(
    values: np.ndarray | DescriptorVector, stats: NormStats
) -> np.ndarray:
    """Map normalized values back to descriptor units."""
    array = _check_compatible(values, stats)
    low = np.array(stats.minimum)
    span = np.array(stats.maximum) - low
    return array * span + low
