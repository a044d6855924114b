"""Test the explorer's view builder."""

import numpy as np
import pytest
from data_types.explorer import ExplorerSettings
from errors import LayoutOverflow, SmilesSyntaxError
from tests.helpers import perceived
from ui.molecule_view import build_view, charge_table


def settings(
    image_size: int = 40, rotation_seed: int | None = None
) -> ExplorerSettings:
    return {
        "image_size": image_size,
        "resolution": 0.5,
        "rotation_seed": rotation_seed,
        "sequence_length": 40,
        "descriptor_count": 5,
    }


def test_build_view_for_aspirin() -> None:
    view = build_view("OC(=O)c1ccccc1OC(C)=O", settings())

    assert len(view["descriptors"]) == 5
    assert view["std_image"].shape == (40, 40, 1)
    assert view["engd_image"].shape == (40, 40, 4)
    assert view["one_hot"].shape == (40, len(view["vocabulary"]))
    assert len(view["charges"]) == 13
    assert view["charges"]["charge"].sum() == pytest.approx(0.0, abs=1e-9)


def test_rotation_is_seeded() -> None:
    first = build_view("CCN", settings(rotation_seed=3))
    second = build_view("CCN", settings(rotation_seed=3))

    np.testing.assert_array_equal(first["engd_image"], second["engd_image"])
    np.testing.assert_array_equal(first["std_image"], second["std_image"])


def test_vocabulary_covers_corpus() -> None:
    view = build_view("CCO", settings(), corpus=["c1ccncc1"])

    assert {"c", "n", "1", "C", "O"} <= set(view["vocabulary"])


def test_charge_table_columns() -> None:
    table = charge_table(perceived("CC(=O)[O-]"))

    assert table.columns.tolist() == [
        "atom",
        "element",
        "hydrogens",
        "hybridization",
        "charge",
    ]
    assert table["charge"].sum() == pytest.approx(-1.0)


def test_errors_propagate() -> None:
    with pytest.raises(SmilesSyntaxError):
        build_view("C1CC", settings())
    with pytest.raises(LayoutOverflow):
        build_view("C" * 30, settings(image_size=20))
