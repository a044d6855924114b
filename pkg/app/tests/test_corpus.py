"""Test the pre-training corpus generator and the toy tasks."""

from pathlib import Path

import numpy as np
import pytest
from chem.canon import canonicalize
from harness.corpus import (
    generate_corpus,
    load_seed_corpus,
    read_corpus,
    write_corpus,
)
from harness.toy_tasks import make_toy_dataset
from tests.helpers import perceived


def test_seed_corpus_parses() -> None:
    seed = load_seed_corpus()

    assert len(seed) > 100
    assert seed[0] == "CCO"


def test_generate_corpus_is_deterministic() -> None:
    first = generate_corpus(40, seed=5, include_seed_corpus=False)

    assert first == generate_corpus(40, seed=5, include_seed_corpus=False)
    assert first != generate_corpus(40, seed=6, include_seed_corpus=False)


def test_generated_molecules_are_canonical_and_unique() -> None:
    corpus = generate_corpus(60, seed=1, include_seed_corpus=False)

    assert len(corpus) == 60
    assert len(set(corpus)) == 60
    assert all(canonicalize(smiles) == smiles for smiles in corpus)


def test_heavy_atom_limit() -> None:
    corpus = generate_corpus(30, seed=2, include_seed_corpus=False, max_heavy_atoms=12)

    assert all(perceived(smiles).heavy_atom_count() <= 12 for smiles in corpus)


def test_seed_corpus_comes_first() -> None:
    corpus = generate_corpus(5, seed=0)

    assert corpus == [canonicalize(smiles) for smiles in load_seed_corpus()[:5]]


def test_corpus_file_round_trip(tmp_path: Path) -> None:
    path = write_corpus(tmp_path / "corpus.smi", ["CCO", "c1ccccc1"])
    path.write_text("# header\n" + path.read_text() + "\nCCN amine\n")

    assert read_corpus(path) == ["CCO", "c1ccccc1", "CCN"]


@pytest.mark.parametrize(
    ("task", "expected"),
    [
        ("hydroxyl", [1.0, 0.0, 1.0, 0.0]),
        ("aromatic_nitrogen", [0.0, 0.0, 0.0, 1.0]),
        ("heteroatom_fraction", [0.5, 0.0, 0.2, 1 / 6]),
    ],
)
def test_toy_labels(task: str, expected: list[float]) -> None:
    dataset = make_toy_dataset(["CO", "CC", "c1ccccc1CC(=O)O", "c1ccncc1"], task)

    np.testing.assert_allclose(dataset.labels[:, 0], expected)
    assert dataset.label_names == [task]


def test_unknown_toy_task() -> None:
    with pytest.raises(KeyError):
        make_toy_dataset(["C"], "solubility")
