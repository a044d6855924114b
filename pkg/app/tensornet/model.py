"""Layered model with a segment map for freezing and head replacement."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from errors import IndexOutOfRange, NonFiniteTensor, ShapeMismatch, SpecError
from tensornet.layers import Head, Layer, Shape


@dataclass(slots=True)
class Segment:
    name: str
    start: int
    stop: int  # exclusive layer index
    trainable: bool = True


@dataclass(slots=True)
class SegmentMap:
    """Ordered named layer ranges that partition a model's layers."""

    segments: list[Segment] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.segments)

    def __getitem__(self, index: int) -> Segment:
        if not 0 <= index < len(self.segments):
            raise IndexOutOfRange(
                f"segment {index} outside 0..{len(self.segments) - 1}"
            )
        return self.segments[index]

    def names(self) -> list[str]:
        return [segment.name for segment in self.segments]

    def validate(self, n_layers: int) -> None:
        cursor = 0
        for segment in self.segments:
            if segment.start != cursor or segment.stop <= segment.start:
                raise SpecError(f"segment {segment.name!r} breaks the layer partition")
            cursor = segment.stop
        if cursor != n_layers:
            raise SpecError(f"segments cover {cursor} of {n_layers} layers")

    def segment_of_layer(self, layer_index: int) -> int:
        for k, segment in enumerate(self.segments):
            if segment.start <= layer_index < segment.stop:
                return k
        raise IndexOutOfRange(f"layer {layer_index} is not in any segment")

    def to_list(self) -> list[dict[str, Any]]:
        return [
            {
                "name": s.name,
                "start": s.start,
                "stop": s.stop,
                "trainable": s.trainable,
            }
            for s in self.segments
        ]

    @classmethod
    def from_list(cls, items: list[dict[str, Any]]) -> SegmentMap:
        return cls([Segment(**item) for item in items])


class Model:
    """
    Ordered top-level layers, a SegmentMap over them, per-parameter RMSprop
    state, and free-form metadata (modality, descriptor names, norm stats,
    vocabulary) carried through save/load.
    """

    def __init__(
        self,
        layers: list[Layer],
        segments: SegmentMap,
        input_shape: Shape,
        dtype: str = "float32",
        metadata: dict[str, Any] | None = None,
    ) -> None:
        segments.validate(len(layers))
        self.layers = layers
        self.segments = segments
        self.input_shape = tuple(input_shape)
        self.dtype = np.dtype(dtype)
        self.metadata: dict[str, Any] = metadata or {}
        self.optimizer_state: dict[str, np.ndarray] = {}
        shape = self.input_shape
        for layer in layers:
            shape = layer.output_shape(shape)
            layer.astype(self.dtype)
        self.output_shape = shape

    # parameters ----------------------------------------------------------

    def named_parameters(self) -> list[tuple[str, np.ndarray]]:
        return [
            item
            for index, layer in enumerate(self.layers)
            for item in layer.named_parameters(f"{index}.{layer.kind}.")
        ]

    def parameter_segment(self, name: str) -> int:
        return self.segments.segment_of_layer(int(name.split(".", 1)[0]))

    def trainable_parameter_names(self) -> list[str]:
        return [
            name
            for name, _ in self.named_parameters()
            if self.segments[self.parameter_segment(name)].trainable
        ]

    def parameter_count(self, trainable_only: bool = False) -> int:
        allowed = set(self.trainable_parameter_names()) if trainable_only else None
        return sum(
            int(value.size)
            for name, value in self.named_parameters()
            if allowed is None or name in allowed
        )

    def initialize(self, rng: np.random.Generator) -> None:
        for layer in self.layers:
            layer.initialize(rng)
            layer.astype(self.dtype)

    def clone(self) -> Model:
        return copy.deepcopy(self)

    def describe(self) -> dict[str, Any]:
        return {
            "input_shape": list(self.input_shape),
            "dtype": self.dtype.name,
            "layers": [layer.config() for layer in self.layers],
            "segments": self.segments.to_list(),
            "metadata": self.metadata,
        }

    # passes --------------------------------------------------------------

    def forward(self, batch: np.ndarray) -> np.ndarray:
        """
        Run every layer on a batch, caching activations for ``backward``.

        Raises:
            ShapeMismatch: batch shape differs from the model input.
            NonFiniteTensor: a layer produced NaN or infinity.
        """
        if tuple(batch.shape[1:]) != self.input_shape:
            raise ShapeMismatch(
                f"model expects N x {self.input_shape}, got {batch.shape}"
            )
        x = batch.astype(self.dtype, copy=False)
        for index, layer in enumerate(self.layers):
            x = layer.forward(x)
            if not np.all(np.isfinite(x)):
                raise NonFiniteTensor(f"layer {index} ({layer.kind}) produced NaN/inf")
        return x

    def backward(self, grad: np.ndarray) -> dict[str, np.ndarray]:
        """
        Backpropagate a loss gradient; returns gradients for every parameter.

        Frozen segments still receive gradients; the optimizer skips them.
        """
        for layer in self.layers:
            layer.zero_grads()
        g = grad.astype(self.dtype, copy=False)
        for index in range(len(self.layers) - 1, -1, -1):
            g = self.layers[index].backward(g)
            if not np.all(np.isfinite(g)):
                raise NonFiniteTensor(f"gradient through layer {index} is NaN/inf")
        return {
            name: value
            for index, layer in enumerate(self.layers)
            for name, value in layer.named_gradients(f"{index}.{layer.kind}.")
        }

    def predict(self, batch: np.ndarray, batch_size: int = 64) -> np.ndarray:
        outputs = [
            self.forward(batch[start : start + batch_size])
            for start in range(0, len(batch), batch_size)
        ]
        if not outputs:
            return np.zeros((0, *self.output_shape), dtype=self.dtype)
        return np.concatenate(outputs)


def forward(model: Model, batch: np.ndarray) -> np.ndarray:
    return model.forward(batch)


def backward(model: Model, grad: np.ndarray) -> dict[str, np.ndarray]:
    return model.backward(grad)


def set_segment_trainable(model: Model, index: int, flag: bool) -> None:
    """Mark one segment trainable or frozen."""
    model.segments[index].trainable = flag


def freeze_bottom(model: Model, n_finetuned: int) -> None:
    """
    Freeze the bottom ``total - n_finetuned`` segments.

    The head segment always stays trainable, so 0 and 1 both fine-tune the
    head alone.
    """
    total = len(model.segments)
    if not 0 <= n_finetuned <= total:
        raise IndexOutOfRange(f"freeze_k {n_finetuned} outside 0..{total}")
    for index in range(total):
        trainable = index >= total - n_finetuned or index == total - 1
        set_segment_trainable(model, index, trainable)


@dataclass(frozen=True, slots=True)
class HeadSpec:
    n_outputs: int
    head: str = "multitask-linear"


def replace_head(model: Model, spec: HeadSpec, rng: np.random.Generator) -> None:
    """
    Swap the head segment for a freshly initialized head.

    Body parameters are left untouched; the new head is trainable and its
    optimizer state starts from zero.
    """
    head_segment = model.segments[len(model.segments) - 1]
    old = model.layers[head_segment.start]
    if not isinstance(old, Head) or head_segment.stop - head_segment.start != 1:
        raise SpecError("the last segment of the model is not a head")
    new = Head(old.in_features, spec.n_outputs, spec.head, pool=old.pool)
    new.astype(model.dtype)
    new.initialize(rng)
    new.astype(model.dtype)
    model.layers[head_segment.start] = new
    head_segment.trainable = True
    prefix = f"{head_segment.start}."
    for name in [n for n in model.optimizer_state if n.startswith(prefix)]:
        del model.optimizer_state[name]
    shape = model.input_shape
    for layer in model.layers:
        shape = layer.output_shape(shape)
    model.output_shape = shape
    architecture = model.metadata.get("architecture")
    if isinstance(architecture, dict):
        architecture.update(n_outputs=spec.n_outputs, head=spec.head)
