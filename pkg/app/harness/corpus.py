"""Bundled seed corpus and a deterministic fragment-assembly corpus generator."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np
from chem.canon import write_canonical_smiles
from chem.graph import largest_fragment
from chem.perception import perceive
from chem.smiles import parse_smiles
from config import ConfigVars
from errors import ChemNetError
from log_tools import Logger
from tqdm import tqdm

app_logger = Logger.get_app_logger()

SEED_CORPUS_FILE = "seed_corpus.smi"

# ``{}`` marks a substitution site directly after an atom.
CORES = (
    "c1c{}cc{}cc1",
    "c1{}ccc{}cc1",
    "c1c{}cnc{}c1",
    "c1nc{}cc{}n1",
    "c1c{}sc{}c1",
    "c1c{}oc{}c1",
    "c1c{}c2ccccc2[nH]1",
    "c1cc2cc{}ccc2c{}c1",
    "C1CC{}CC{}C1",
    "C1CC{}N{}C1",
    "N1{}CCN{}CC1",
    "C1COCCN1{}",
    "CC{}C{}C",
    "C{}C(=O)N{}C",
    "CCC{}=C{}C",
)
SUBSTITUENTS = (
    "C",
    "CC",
    "O",
    "N",
    "F",
    "Cl",
    "Br",
    "CO",
    "CN",
    "OC",
    "OCC",
    "C#N",
    "C(C)C",
    "C(=O)O",
    "C(=O)N",
    "C(=O)C",
    "NC(=O)C",
    "C(F)(F)F",
    "[N+](=O)[O-]",
    "S(=O)(=O)N",
    "c5ccccc5",
)
LINKERS = ("", "C", "CC", "O", "N", "C(=O)N", "CO")
EMPTY_SITE = 0.35
LINK_PROBABILITY = 0.3


def read_corpus(path: str | Path) -> list[str]:
    """SMILES from the first column of a ``.smi`` file; ``#`` lines are skipped."""
    smiles = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        text = line.strip()
        if text and not text.startswith("#"):
            smiles.append(text.split()[0])
    return smiles


def write_corpus(path: str | Path, smiles: Sequence[str]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(f"{s}\n" for s in smiles), encoding="utf-8")
    return out


def load_seed_corpus() -> list[str]:
    return read_corpus(Path(ConfigVars().RESOURCES_DIR) / SEED_CORPUS_FILE)


def _shift_rings(core: str) -> str:
    return core.translate(str.maketrans({"1": "3", "2": "4"}))


def _fill(core: str, rng: np.random.Generator, nested: str | None = None) -> str:
    sites = core.count("{}")
    fills = []
    for _ in range(sites):
        if rng.random() < EMPTY_SITE:
            fills.append("")
        else:
            fills.append(f"({SUBSTITUENTS[rng.integers(len(SUBSTITUENTS))]})")
    if nested is not None and sites:
        fills[int(rng.integers(sites))] = f"({nested})"
    return core.format(*fills)


def assemble(rng: np.random.Generator) -> str:
    """One random SMILES: a substituted core, sometimes linked to a second core."""
    core = CORES[rng.integers(len(CORES))]
    nested = None
    if rng.random() < LINK_PROBABILITY:
        inner = _shift_rings(CORES[rng.integers(len(CORES))])
        linker = LINKERS[rng.integers(len(LINKERS))]
        nested = linker + _fill(inner, rng)
    return _fill(core, rng, nested)


@Logger.log
def generate_corpus(
    n: int,
    seed: int = 0,
    include_seed_corpus: bool = True,
    max_heavy_atoms: int = 28,
    progress: bool = False,
) -> list[str]:
    """
    ``n`` unique canonical SMILES, identical for identical arguments.

    The seed corpus comes first (when included), followed by assembled
    molecules; anything that fails to parse or exceeds ``max_heavy_atoms`` is
    skipped.
    """
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    corpus: list[str] = []

    def offer(smiles: str) -> None:
        try:
            mol = largest_fragment(perceive(parse_smiles(smiles)))
            canonical = write_canonical_smiles(mol)
        except ChemNetError:
            return
        heavy = sum(1 for atom in mol.atoms if atom.atomic_number > 1)
        if canonical in seen or heavy > max_heavy_atoms:
            return
        seen.add(canonical)
        corpus.append(canonical)

    if include_seed_corpus:
        for smiles in load_seed_corpus():
            if len(corpus) >= n:
                break
            offer(smiles)

    budget = 50 * n
    with tqdm(total=n, initial=len(corpus), disable=not progress) as bar:
        while len(corpus) < n and budget > 0:
            budget -= 1
            before = len(corpus)
            offer(assemble(rng))
            bar.update(len(corpus) - before)
    if len(corpus) < n:
        app_logger.warning("Generated %d of %d requested molecules", len(corpus), n)
    return corpus
