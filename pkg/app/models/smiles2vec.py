"""SMILES2vec-lite: two stacked GRUs over one-hot SMILES, then a dense head."""

from __future__ import annotations

import numpy as np
from config import Smiles2VecSpec
from tensornet.layers import Head, Layer
from tensornet.model import Model, Segment, SegmentMap
from tensornet.recurrent import GRU


def build_smiles2vec(
    spec: Smiles2VecSpec, seed: int = 0, dtype: str = "float32"
) -> Model:
    """Segments are ``gru1``, ``gru2`` and ``head``; input is ``L x V``."""
    u = spec.hidden
    layers: list[Layer] = [
        GRU(spec.vocab_size, u, return_sequences=True),
        GRU(u, u),
        Head(u, spec.n_outputs, spec.head),
    ]
    segments = SegmentMap(
        [Segment("gru1", 0, 1), Segment("gru2", 1, 2), Segment("head", 2, 3)]
    )
    model = Model(
        layers,
        segments,
        (spec.length, spec.vocab_size),
        dtype=dtype,
        metadata={"architecture": spec.model_dump()},
    )
    model.initialize(np.random.default_rng(seed))
    return model


def expected_parameter_count(spec: Smiles2VecSpec) -> int:
    v, u, n = spec.vocab_size, spec.hidden, spec.n_outputs
    gru1 = 3 * u * (v + u + 1)
    gru2 = 3 * u * (2 * u + 1)
    return gru1 + gru2 + u * n + n
