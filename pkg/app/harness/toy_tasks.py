"""Rule-labelled toy datasets for exercising the fine-tuning protocol."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
from data_types.molecule import MolGraph
from harness.dataset import Dataset, TaskKind, Validator, build_dataset


def has_hydroxyl(mol: MolGraph) -> float:
    """1.0 when some oxygen carries a hydrogen (alcohols, phenols, acids)."""
    return float(any(a.element == "O" and a.total_h >= 1 for a in mol.atoms))


def has_aromatic_nitrogen(mol: MolGraph) -> float:
    return float(any(a.element == "N" and a.aromatic for a in mol.atoms))


def heteroatom_fraction(mol: MolGraph) -> float:
    heavy = [a for a in mol.atoms if a.atomic_number > 1]
    if not heavy:
        return 0.0
    return sum(1 for a in heavy if a.element != "C") / len(heavy)


TOY_TASKS: dict[str, tuple[TaskKind, Callable[[MolGraph], float]]] = {
    "hydroxyl": (TaskKind.CLASSIFICATION, has_hydroxyl),
    "aromatic_nitrogen": (TaskKind.CLASSIFICATION, has_aromatic_nitrogen),
    "heteroatom_fraction": (TaskKind.REGRESSION, heteroatom_fraction),
}


def make_toy_dataset(
    smiles: Sequence[str], task: str, validate: Validator | None = None
) -> Dataset:
    """Label each molecule by the named rule; unparseable entries are rejected."""
    if task not in TOY_TASKS:
        raise KeyError(f"unknown toy task {task!r}; choose from {sorted(TOY_TASKS)}")
    kind, rule = TOY_TASKS[task]
    dataset = build_dataset(
        smiles,
        np.full((len(smiles), 1), np.nan),
        kind,
        [task],
        validate=validate,
    )
    dataset.labels = np.array([[rule(mol)] for mol in dataset.mols])
    return dataset
