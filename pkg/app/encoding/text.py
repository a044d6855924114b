"""Character-level one-hot encoding of canonical SMILES."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from config import ConfigVars
from errors import EmptyDataset, FormatError, TooLong, UnknownCharacter

PAD = "_"


@dataclass(frozen=True, slots=True)
class Vocab:
    """PAD at index 0 followed by corpus characters in code-point order."""

    symbols: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.symbols or self.symbols[0] != PAD:
            raise ValueError("vocabulary must start with the PAD symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("vocabulary symbols must be unique")
        object.__setattr__(
            self, "index", {char: i for i, char in enumerate(self.symbols)}
        )

    @property
    def size(self) -> int:
        return len(self.symbols)

    def save(self, path: str | Path) -> Path:
        """One symbol per line; the line number is the index."""
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(self.symbols) + "\n", encoding="utf-8")
        return out

    @classmethod
    def load(cls, path: str | Path) -> Vocab:
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        try:
            return cls(symbols=tuple(lines))
        except ValueError as err:
            raise FormatError(f"{path}: {err}") from err


def build_vocab(corpus: Iterable[str]) -> Vocab:
    """Vocabulary of every character in the corpus, sorted by code point."""
    characters: set[str] = set()
    empty = True
    for smiles in corpus:
        empty = False
        characters.update(smiles)
    if empty:
        raise EmptyDataset("cannot build a vocabulary from an empty corpus")
    if PAD in characters:
        raise UnknownCharacter(f"corpus uses the reserved PAD symbol {PAD!r}")
    return Vocab(symbols=(PAD, *sorted(characters)))


def encode(smiles: str, vocab: Vocab, length: int | None = None) -> np.ndarray:
    """
    One-hot L x V matrix, centered with PAD rows on both sides.

    The left pad is ``floor((L - n) / 2)`` rows and the right pad takes the rest.

    Raises:
        TooLong: the string is longer than L.
        UnknownCharacter: a character is missing from the vocabulary.
    """
    size = length if length is not None else ConfigVars().SEQUENCE_LENGTH
    n = len(smiles)
    if n > size:
        raise TooLong(f"SMILES of length {n} exceeds sequence length {size}")
    left = (size - n) // 2
    rows = np.zeros(size, dtype=np.int64)
    for offset, char in enumerate(smiles):
        code = vocab.index.get(char)
        if code is None or char == PAD:
            raise UnknownCharacter(f"character {char!r} not in vocabulary")
        rows[left + offset] = code
    return np.eye(vocab.size, dtype=np.float32)[rows]


def encode_batch(
    smiles: Sequence[str], vocab: Vocab, length: int | None = None
) -> np.ndarray:
    """Stack encodings into an N x L x V tensor."""
    size = length if length is not None else ConfigVars().SEQUENCE_LENGTH
    if not smiles:
        return np.zeros((0, size, vocab.size), dtype=np.float32)
    return np.stack([encode(s, vocab, size) for s in smiles])


def decode(matrix: np.ndarray, vocab: Vocab) -> str:
    """Argmax inverse of ``encode`` with PAD rows dropped."""
    codes = np.argmax(np.asarray(matrix), axis=-1)
    return "".join(vocab.symbols[code] for code in codes if code != 0)
