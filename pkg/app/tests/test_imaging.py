"""Test 2D layout, rasterization and tensor dumps."""

import itertools
import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from data_types.molecule import MolGraph
from errors import FormatError, LayoutOverflow, PixelCollision
from harness.corpus import load_seed_corpus
from imaging.dump import read_tensor_dump, write_tensor_dump
from imaging.layout import BOND_LENGTH, Layout2D, layout_2d, rotate_layout
from imaging.raster import (
    ImageScheme,
    augmented_sample,
    bresenham,
    rasterize,
    to_pixels,
)


def pairwise(coords: np.ndarray) -> np.ndarray:
    return np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)


def bond_lengths(mol: MolGraph, layout: Layout2D) -> list[float]:
    position = {atom: k for k, atom in enumerate(layout.atoms)}
    coords = layout.coords
    return [
        float(np.linalg.norm(coords[position[b.a]] - coords[position[b.b]]))
        for b in mol.bonds
    ]


def test_ethane_layout(mol_from: Callable[[str], MolGraph]) -> None:
    layout = layout_2d(mol_from("CC"))

    assert layout.coords.shape == (2, 2)
    assert pairwise(layout.coords)[0, 1] == pytest.approx(BOND_LENGTH, abs=1e-6)


def test_benzene_is_regular_hexagon(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("c1ccccc1")
    layout = layout_2d(mol)

    assert bond_lengths(mol, layout) == pytest.approx([1.5] * 6, abs=0.01)
    radii = np.linalg.norm(layout.coords - layout.coords.mean(axis=0), axis=1)
    assert radii == pytest.approx([1.5] * 6, abs=0.01)


def test_layout_is_deterministic_and_centered(
    mol_from: Callable[[str], MolGraph],
) -> None:
    mol = mol_from("CC(=O)Oc1ccccc1C(=O)O")
    first, second = layout_2d(mol), layout_2d(mol)

    np.testing.assert_array_equal(first.coords, second.coords)
    center = (first.coords.max(axis=0) + first.coords.min(axis=0)) / 2
    np.testing.assert_allclose(center, 0.0, atol=1e-9)


def test_layout_overflow(mol_from: Callable[[str], MolGraph]) -> None:
    with pytest.raises(LayoutOverflow):
        layout_2d(mol_from("C" * 30), image_size=20, resolution=0.5)


def test_seed_corpus_layout_audit(mol_from: Callable[[str], MolGraph]) -> None:
    for smiles in load_seed_corpus():
        mol = mol_from(smiles)
        layout = layout_2d(mol)
        if len(layout.atoms) > 1:
            distances = pairwise(layout.coords)
            np.fill_diagonal(distances, np.inf)
            assert distances.min() >= 0.9, smiles

        image = rasterize(mol, layout, ImageScheme.ENGD)
        assert image.pixels.min() >= 0.0, smiles
        assert image.pixels.max() <= 1.0, smiles


def test_rotation_identities(mol_from: Callable[[str], MolGraph]) -> None:
    layout = layout_2d(mol_from("CC(C)Cc1ccc(cc1)C(C)C(=O)O"))

    np.testing.assert_allclose(rotate_layout(layout, 0.0).coords, layout.coords)
    twice = rotate_layout(rotate_layout(layout, math.pi), math.pi)
    np.testing.assert_allclose(twice.coords, layout.coords, atol=1e-9)
    turned = rotate_layout(layout, 1.234)
    np.testing.assert_allclose(
        pairwise(turned.coords), pairwise(layout.coords), atol=1e-9
    )


def test_bresenham_excludes_endpoints() -> None:
    assert list(bresenham((0, 0), (3, 0))) == [(1, 0), (2, 0)]
    assert list(bresenham((0, 0), (1, 1))) == []
    assert list(bresenham((0, 0), (3, 3))) == [(1, 1), (2, 2)]


def test_ethane_std_image(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CC")
    image = rasterize(mol, layout_2d(mol), ImageScheme.STD, 80, 0.5)
    values = image.pixels[image.pixels != 0]

    assert image.shape == (80, 80, 1)
    assert np.count_nonzero(np.isclose(values, 0.06)) == 2
    assert np.count_nonzero(np.isclose(values, 0.01)) >= 1
    assert np.all(np.isclose(values, 0.06) | np.isclose(values, 0.01))


def test_benzene_engd_image(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("c1ccccc1")
    image = rasterize(mol, layout_2d(mol), ImageScheme.ENGD, 80, 0.5)
    atom_pixels = image.pixels[np.isclose(image.pixels[:, :, 0], 0.06)]

    assert image.shape == (80, 80, 4)
    assert len(atom_pixels) == 6
    assert atom_pixels[:, 3] == pytest.approx([2 / 3] * 6)
    assert np.all(image.pixels[image.pixels[:, :, 0] == 0] == 0)


def test_nonzero_pixels_bounded_by_atoms_and_bonds(
    mol_from: Callable[[str], MolGraph],
) -> None:
    mol = mol_from("O=C(O)c1ccccc1O")
    layout = layout_2d(mol)
    pixels = to_pixels(layout, 80, 0.5)
    where = {atom: tuple(p) for atom, p in zip(layout.atoms, pixels, strict=True)}
    traced = sum(len(list(bresenham(where[b.a], where[b.b]))) for b in mol.bonds)
    image = rasterize(mol, layout, ImageScheme.STD, 80, 0.5)

    assert np.count_nonzero(image.pixels) <= len(layout.atoms) + traced


def test_pixel_collision(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CC")
    layout = Layout2D(coords=np.array([[0.0, 0.0], [0.1, 0.0]]), atoms=(0, 1))

    with pytest.raises(PixelCollision):
        rasterize(mol, layout, ImageScheme.STD, 80, 0.5)


def test_atoms_outside_image(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CC")
    layout = Layout2D(coords=np.array([[0.0, 0.0], [30.0, 0.0]]), atoms=(0, 1))

    with pytest.raises(LayoutOverflow):
        rasterize(mol, layout, ImageScheme.STD, 80, 0.5)


def test_augmented_sample_determinism(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CC(=O)Nc1ccc(O)cc1")
    draws = [
        augmented_sample(mol, ImageScheme.ENGD, np.random.default_rng(7)).pixels
        for _ in range(2)
    ]

    assert draws[0].tobytes() == draws[1].tobytes()


def test_augmented_sample_without_rng(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CCO")
    layout = layout_2d(mol)

    plain = augmented_sample(mol, ImageScheme.STD, None, layout=layout)
    np.testing.assert_array_equal(
        plain.pixels, rasterize(mol, layout, ImageScheme.STD).pixels
    )


def test_augmented_samples_vary(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CC(C)Cc1ccc(cc1)C(C)C(=O)O")
    rng = np.random.default_rng(0)
    images = [augmented_sample(mol, ImageScheme.STD, rng).pixels for _ in range(4)]

    assert any(
        not np.array_equal(a, b) for a, b in itertools.combinations(images, 2)
    )


def test_tensor_dump(tmp_path: Path) -> None:
    tensor = np.arange(24, dtype=np.float32).reshape(2, 3, 4) / 10
    path = write_tensor_dump(tmp_path / "t.bin", tensor)

    assert path.read_bytes().startswith(b"2 3 4\n")
    np.testing.assert_array_equal(read_tensor_dump(path), tensor)
    matrix = write_tensor_dump(tmp_path / "m.bin", tensor[0])
    assert read_tensor_dump(matrix).shape == (3, 4, 1)

    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(FormatError):
        read_tensor_dump(path)
