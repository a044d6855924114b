"""Rasterization of laid-out molecules into Std and EngD images."""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum

import numpy as np
from chem.gasteiger import with_partial_charges
from config import ConfigVars
from data_types.molecule import BondOrder, Hybridization, MolGraph
from errors import LayoutOverflow, PixelCollision
from imaging.layout import Layout2D, layout_2d, rotate_layout

MAX_ROTATION_ATTEMPTS = 8

HYBRIDIZATION_LEVEL = {
    Hybridization.SP: 1 / 3,
    Hybridization.SP2: 2 / 3,
    Hybridization.SP3: 1.0,
    Hybridization.OTHER: 1 / 6,
}


class ImageScheme(Enum):
    STD = "std"
    ENGD = "engd"

    @property
    def channels(self) -> int:
        return 1 if self is ImageScheme.STD else 4

    @classmethod
    def from_modality(cls, modality: str) -> ImageScheme:
        """Map ``image-std`` / ``image-engd`` to a scheme."""
        return cls(modality.removeprefix("image-"))


@dataclass(frozen=True, slots=True)
class MolImage:
    pixels: np.ndarray  # H x W x C
    scheme: ImageScheme
    resolution: float

    @property
    def shape(self) -> tuple[int, int, int]:
        h, w, c = self.pixels.shape
        return h, w, c


def bresenham(
    start: tuple[int, int], end: tuple[int, int]
) -> Iterator[tuple[int, int]]:
    """Integer line from ``start`` to ``end``, both endpoints excluded."""
    (x0, y0), (x1, y1) = start, end
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while (x, y) != (x1, y1):
        doubled = 2 * err
        if doubled >= dy:
            err += dy
            x += sx
        if doubled <= dx:
            err += dx
            y += sy
        if (x, y) != (x1, y1):
            yield x, y


def to_pixels(layout: Layout2D, image_size: int, resolution: float) -> np.ndarray:
    """Column/row pixel per atom: ``floor(v / res + 0.5) + size // 2``."""
    pixels = np.floor(layout.coords / resolution + 0.5).astype(np.int64)
    return pixels + image_size // 2


def rasterize(
    mol: MolGraph,
    layout: Layout2D,
    scheme: ImageScheme = ImageScheme.STD,
    image_size: int | None = None,
    resolution: float | None = None,
) -> MolImage:
    """
    Draw atoms and bonds of a laid-out molecule onto a blank image.

    Bond pixels are traced first (endpoints excluded) and atom pixels are
    drawn afterwards, overwriting any bond pixel underneath. EngD charges are
    computed here by the Gasteiger scheme (zero when parameters are missing).

    Args:
        mol: perceived molecular graph the layout was built from.
        layout: atom coordinates.
        scheme: Std (atomic number and bond order) or EngD (four channels).
        image_size: square image side in pixels.
        resolution: distance units per pixel.

    Returns:
        MolImage: float32 pixels in [0, 1], background exactly 0.

    Raises:
        LayoutOverflow: an atom lands outside the image.
        PixelCollision: two atoms land on the same pixel.
    """
    config = ConfigVars()
    size = image_size if image_size is not None else config.IMAGE_SIZE
    res = resolution if resolution is not None else config.IMAGE_RESOLUTION

    pixels = to_pixels(layout, size, res)
    if pixels.min() < 0 or pixels.max() >= size:
        raise LayoutOverflow(f"atoms fall outside the {size}x{size} image")
    where = {
        atom: (int(p[0]), int(p[1]))
        for atom, p in zip(layout.atoms, pixels, strict=True)
    }
    if len(set(where.values())) < len(where):
        raise PixelCollision(f"two atoms share a pixel in {mol.source_smiles!r}")

    image = np.zeros((size, size, scheme.channels), dtype=np.float32)
    for bond in mol.bonds:
        if bond.a not in where or bond.b not in where:
            continue
        order = 1.5 if bond.order is BondOrder.AROMATIC else float(bond.order)
        for col, row in bresenham(where[bond.a], where[bond.b]):
            image[row, col, :] = 0.0
            image[row, col, 0] = order / 100

    charged = (
        with_partial_charges(mol, zero_on_missing=True)
        if scheme is ImageScheme.ENGD
        else mol
    )
    for index, (col, row) in where.items():
        atom = charged.atoms[index]
        image[row, col, 0] = atom.atomic_number / 100
        if scheme is ImageScheme.ENGD:
            image[row, col, 1] = min(max((atom.partial_charge + 2) / 4, 0.0), 1.0)
            image[row, col, 2] = min(atom.total_valence / 8, 1.0)
            image[row, col, 3] = HYBRIDIZATION_LEVEL[atom.hybridization]
    return MolImage(pixels=image, scheme=scheme, resolution=res)


def augmented_sample(
    mol: MolGraph,
    scheme: ImageScheme,
    rng: np.random.Generator | None,
    image_size: int | None = None,
    resolution: float | None = None,
    layout: Layout2D | None = None,
) -> MolImage:
    """
    Rasterize under a random rotation in [0, pi).

    Up to MAX_ROTATION_ATTEMPTS rotations are tried when atoms collide or
    leave the image; after that the unrotated layout is drawn. With
    ``rng=None`` no rotation is applied.
    """
    if layout is None:
        layout = layout_2d(mol, image_size, resolution)
    if rng is not None:
        for _ in range(MAX_ROTATION_ATTEMPTS):
            theta = float(rng.uniform(0.0, math.pi))
            try:
                return rasterize(
                    mol, rotate_layout(layout, theta), scheme, image_size, resolution
                )
            except (PixelCollision, LayoutOverflow):
                continue
    return rasterize(mol, layout, scheme, image_size, resolution)
