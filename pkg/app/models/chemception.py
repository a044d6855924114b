"""
Chemception-lite: an Inception-ResNet style CNN over molecule images.

Segments, bottom to top::

    stem            4x4 conv, stride 2, F filters, relu
    inception_t     residual( concat(1x1 F, 1x1 F -> 3x3 F) -> 1x1 linear ), relu
    reduction_t     concat(maxpool 3x3/2, 3x3/2 F, 1x1 F -> 3x3/2 2F)
    head            global average pool, dense, output activation

with ``t = 1..T``; each reduction halves the grid and adds 3F channels.
"""

from __future__ import annotations

import numpy as np
from config import ChemceptionSpec
from errors import SpecError
from tensornet.layers import (
    Concat,
    Conv2D,
    Head,
    Layer,
    MaxPool2D,
    ReLU,
    Residual,
    Sequential,
)
from tensornet.model import Model, Segment, SegmentMap


def _conv(in_channels: int, filters: int, kernel: int, stride: int = 1) -> list[Layer]:
    return [Conv2D(in_channels, filters, kernel, stride=stride), ReLU()]


def stem_block(channels: int, filters: int) -> Sequential:
    return Sequential(_conv(channels, filters, 4, stride=2))


def inception_resnet_block(channels: int, filters: int) -> Residual:
    """Four convolutions; output has the same shape as the input."""
    branches = Concat(
        [
            Sequential(_conv(channels, filters, 1)),
            Sequential(_conv(channels, filters, 1) + _conv(filters, filters, 3)),
        ]
    )
    projection = Conv2D(2 * filters, channels, 1, init="glorot")
    return Residual(Sequential([branches, projection]), ReLU())


def reduction_block(channels: int, filters: int) -> Concat:
    """Three convolutions plus a pool; output has ``channels + 3 * filters``."""
    return Concat(
        [
            MaxPool2D(pool=3, stride=2),
            Sequential(_conv(channels, filters, 3, stride=2)),
            Sequential(
                _conv(channels, filters, 1) + _conv(filters, 2 * filters, 3, stride=2)
            ),
        ]
    )


def min_extent(depth: int) -> int:
    return 2 ** (depth + 1)


def build_chemception(
    spec: ChemceptionSpec, seed: int = 0, dtype: str = "float32"
) -> Model:
    """
    Build and initialize a Chemception-lite model for ``spec``.

    The model has ``2T + 2`` segments. The same spec, seed and dtype always
    give bit-identical parameters.

    Raises:
        SpecError: the image is smaller than ``2 ** (T + 1)`` pixels.
    """
    if spec.height < min_extent(spec.T):
        raise SpecError(
            f"{spec.height}px images are too small for T={spec.T};"
            f" need at least {min_extent(spec.T)}"
        )
    f = spec.F
    layers: list[Layer] = [stem_block(spec.channels, f)]
    segments = [Segment("stem", 0, 1)]
    channels = f
    for t in range(1, spec.T + 1):
        layers.append(inception_resnet_block(channels, f))
        segments.append(Segment(f"inception_{t}", len(layers) - 1, len(layers)))
        layers.append(reduction_block(channels, f))
        segments.append(Segment(f"reduction_{t}", len(layers) - 1, len(layers)))
        channels += 3 * f
    layers.append(Head(channels, spec.n_outputs, spec.head, pool=True))
    segments.append(Segment("head", len(layers) - 1, len(layers)))

    model = Model(
        layers,
        SegmentMap(segments),
        (spec.height, spec.width, spec.channels),
        dtype=dtype,
        metadata={"architecture": spec.model_dump()},
    )
    model.initialize(np.random.default_rng(seed))
    return model


def expected_parameter_count(spec: ChemceptionSpec) -> int:
    """Closed-form parameter count of ``build_chemception(spec)``."""
    f, c = spec.F, spec.channels
    total = 16 * c * f + f
    channels = f
    for _ in range(spec.T):
        total += 2 * (channels * f + f) + 9 * f * f + f
        total += 2 * f * channels + channels
        total += 9 * channels * f + f
        total += channels * f + f + 18 * f * f + 2 * f
        channels += 3 * f
    return total + channels * spec.n_outputs + spec.n_outputs
