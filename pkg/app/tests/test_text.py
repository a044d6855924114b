"""Test the one-hot SMILES encoding."""

from pathlib import Path

import numpy as np
import pytest
from chem.canon import canonicalize
from encoding.text import PAD, Vocab, build_vocab, decode, encode, encode_batch
from errors import EmptyDataset, FormatError, TooLong, UnknownCharacter
from harness.corpus import load_seed_corpus


def test_build_vocab() -> None:
    vocab = build_vocab(["CCO", "C=O"])

    assert vocab.symbols == (PAD, "=", "C", "O")
    assert vocab.size == 4
    assert build_vocab(["C"]).size == 2
    assert build_vocab(["C=O", "CCO"]) == vocab


def test_build_vocab_rejects_empty_corpus() -> None:
    with pytest.raises(EmptyDataset):
        build_vocab([])


def test_vocab_file_without_pad_is_malformed(tmp_path: Path) -> None:
    path = tmp_path / "vocab.txt"
    path.write_text("C\nO\n")

    with pytest.raises(FormatError):
        Vocab.load(path)


def test_encode_centers_with_pad_rows() -> None:
    vocab = build_vocab(["CCO"])
    matrix = encode("CCO", vocab, 5)

    assert matrix.shape == (5, 3)
    symbols = [vocab.symbols[k] for k in matrix.argmax(axis=1)]
    assert symbols == [PAD, "C", "C", "O", PAD]
    assert np.all(matrix.sum(axis=1) == 1)


def test_encode_odd_padding_goes_right() -> None:
    vocab = build_vocab(["CO"])
    codes = encode("CO", vocab, 5).argmax(axis=1).tolist()

    assert codes == [0, 1, 2, 0, 0]


def test_encode_full_length_has_no_padding() -> None:
    vocab = build_vocab(["CCO"])

    assert encode("CCO", vocab, 3)[:, 0].sum() == 0


def test_encode_errors() -> None:
    vocab = build_vocab(["CCO"])

    with pytest.raises(TooLong):
        encode("CCOCC", vocab, 4)
    with pytest.raises(UnknownCharacter):
        encode("CCN", vocab, 10)


def test_decode_inverts_encode_on_seed_corpus() -> None:
    corpus = [canonicalize(smiles) for smiles in load_seed_corpus()]
    vocab = build_vocab(corpus)

    for smiles in corpus:
        assert decode(encode(smiles, vocab, 250), vocab) == smiles


def test_batch_column_sums_count_characters() -> None:
    corpus = ["CCO", "c1ccccc1", "C=O"]
    vocab = build_vocab(corpus)
    batch = encode_batch(corpus, vocab, 10)
    counts = batch.sum(axis=(0, 1))

    assert batch.shape == (3, 10, vocab.size)
    assert counts[vocab.index[PAD]] == 30 - sum(len(s) for s in corpus)
    assert counts[vocab.index["C"]] == 3
    assert counts[vocab.index["c"]] == 6
    assert encode_batch([], vocab, 10).shape == (0, 10, vocab.size)


def test_vocab_save_load(tmp_path: Path) -> None:
    vocab = build_vocab(["CC(=O)O", "c1ccncc1"])
    loaded = Vocab.load(vocab.save(tmp_path / "vocab.txt"))

    assert loaded == vocab
    assert loaded.index == vocab.index
