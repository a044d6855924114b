"""Turn molecules into model inputs for each modality."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Protocol

import numpy as np
from data_types.molecule import MolGraph
from encoding.text import Vocab, encode, encode_batch
from errors import ModalityMismatch
from imaging.layout import Layout2D, layout_2d
from imaging.raster import ImageScheme, augmented_sample, rasterize


class Encoder(Protocol):
    modality: str

    def check(self, mol: MolGraph, canonical: str) -> None: ...

    def bind(self, mols: Sequence[MolGraph], canonical: Sequence[str]) -> None: ...

    def batch(
        self, indices: Sequence[int], rng: np.random.Generator | None = None
    ) -> np.ndarray: ...


class ImageEncoder:
    """
    Std or EngD rasters. Layouts and unrotated images are cached per record;
    with an ``rng`` every call draws a fresh random rotation.
    """

    def __init__(self, modality: str, image_size: int, resolution: float) -> None:
        self.modality = modality
        self.scheme = ImageScheme.from_modality(modality)
        self.image_size = image_size
        self.resolution = resolution
        self._mols: list[MolGraph] = []
        self._layouts: list[Layout2D] = []
        self._plain: dict[int, np.ndarray] = {}

    def check(self, mol: MolGraph, canonical: str) -> None:
        rasterize(
            mol,
            layout_2d(mol, self.image_size, self.resolution),
            self.scheme,
            self.image_size,
            self.resolution,
        )

    def bind(self, mols: Sequence[MolGraph], canonical: Sequence[str]) -> None:
        self._mols = list(mols)
        self._layouts = [
            layout_2d(mol, self.image_size, self.resolution) for mol in self._mols
        ]
        self._plain = {}

    def _image(self, index: int, rng: np.random.Generator | None) -> np.ndarray:
        if rng is None and index in self._plain:
            return self._plain[index]
        image = augmented_sample(
            self._mols[index],
            self.scheme,
            rng,
            self.image_size,
            self.resolution,
            layout=self._layouts[index],
        ).pixels
        if rng is None:
            self._plain[index] = image
        return image

    def batch(
        self, indices: Sequence[int], rng: np.random.Generator | None = None
    ) -> np.ndarray:
        return np.stack([self._image(int(i), rng) for i in indices])


class TextEncoder:
    """One-hot canonical SMILES; the whole bound set is encoded up front."""

    modality = "text"

    def __init__(self, vocab: Vocab, length: int) -> None:
        self.vocab = vocab
        self.length = length
        self._encoded = np.zeros((0, length, vocab.size), dtype=np.float32)

    def check(self, mol: MolGraph, canonical: str) -> None:
        encode(canonical, self.vocab, self.length)

    def bind(self, mols: Sequence[MolGraph], canonical: Sequence[str]) -> None:
        self._encoded = encode_batch(list(canonical), self.vocab, self.length)

    def batch(
        self, indices: Sequence[int], rng: np.random.Generator | None = None
    ) -> np.ndarray:
        return self._encoded[np.asarray(indices, dtype=np.int64)]


def make_encoder(
    modality: str,
    image_size: int,
    resolution: float,
    sequence_length: int,
    vocab: Vocab | None = None,
) -> ImageEncoder | TextEncoder:
    if modality == "text":
        if vocab is None:
            raise ModalityMismatch("text encoding needs a vocabulary")
        return TextEncoder(vocab, sequence_length)
    return ImageEncoder(modality, image_size, resolution)
