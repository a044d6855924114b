"""Test utils/common.py."""

import os
from pathlib import Path

import pandas as pd
from utils.common import generate_filename, get_timestamp, save_output, save_table


def test_generate_filename() -> None:
    """Test generate_filename()."""
    title: str = "Hello World!"
    expected_filename: str = "Hello_World"

    result: str = generate_filename(title)

    assert result == expected_filename


def test_generate_filename_keeps_dashes() -> None:
    """Test generate_filename() on a run label."""
    assert generate_filename("finetune T3-F16") == "finetune_T3-F16"


def test_get_timestamp() -> None:
    """Test get_timestamp()."""
    stamp: str = get_timestamp()

    assert len(stamp) == 14
    assert stamp.isdigit()


def test_save_output(tmp_path: Path) -> None:
    """Test save_output()."""
    title: str = "test"
    output: str = "descriptor,value\nmolecular_weight,44.1\n"

    result = save_output(title, output, output_folder=str(tmp_path / "outputs"))

    assert os.path.exists(result)
    with open(result, encoding="utf-8") as fileout:
        assert fileout.read() == output


def test_save_table_by_suffix(tmp_path: Path) -> None:
    """Test save_table() writes CSV or TSV by suffix."""
    frame = pd.DataFrame({"freeze_k": [0, 1], "mean": [0.5, 0.75]})

    csv_path = save_table(frame, tmp_path / "sweep.csv")
    tsv_path = save_table(frame, tmp_path / "nested" / "sweep.tsv")

    assert pd.read_csv(csv_path).equals(frame)
    assert pd.read_csv(tsv_path, sep="\t").equals(frame)
