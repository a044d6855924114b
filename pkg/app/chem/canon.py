"""Canonical atom ranking (iterative Morgan-style refinement) and canonical SMILES."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

from chem.graph import largest_fragment
from chem.perception import perceive
from chem.smiles import parse_smiles, write_smiles
from data_types.molecule import MolGraph


def _dense_ranks(keys: Sequence[Any]) -> list[int]:
    """Rank each key by its position among the sorted distinct keys."""
    order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys]


def atom_invariants(mol: MolGraph) -> list[tuple[int, int, int, int, int, int]]:
    return [
        (
            atom.atomic_number,
            atom.degree,
            atom.formal_charge,
            atom.total_h,
            int(atom.aromatic),
            int(atom.in_ring),
        )
        for atom in mol.atoms
    ]


def _refine(mol: MolGraph, classes: list[int]) -> list[int]:
    """Split classes by neighbor classes and bond orders until stable."""
    bonds = mol.bond_lookup()
    while True:
        keys = [
            (
                classes[i],
                tuple(
                    sorted(
                        (classes[nbr], int(bonds[(min(i, nbr), max(i, nbr))].order))
                        for nbr in mol.adjacency[i]
                    )
                ),
            )
            for i in range(mol.n_atoms)
        ]
        refined = _dense_ranks(keys)
        if len(set(refined)) == len(set(classes)):
            return refined
        classes = refined


def canonical_ranks(mol: MolGraph) -> list[int]:
    """
    Canonical rank per atom, a permutation of ``0..n-1``.

    Atoms start from their (element, degree, charge, hydrogens, aromatic,
    ring) invariant and are refined by their neighbors' classes. Remaining
    ties are broken by promoting the lowest-index atom of the smallest tied
    class, then refining again.
    """
    classes = _refine(mol, _dense_ranks(atom_invariants(mol)))
    while len(set(classes)) < mol.n_atoms:
        counts: dict[int, int] = {}
        for value in classes:
            counts[value] = counts.get(value, 0) + 1
        tied = min(value for value, count in counts.items() if count > 1)
        promoted = classes.index(tied)
        doubled = [2 * value for value in classes]
        doubled[promoted] -= 1
        classes = _refine(mol, _dense_ranks(doubled))
    return classes


def write_canonical_smiles(mol: MolGraph) -> str:
    """SMILES emitted from the rank-0 atom with neighbors visited in rank order."""
    return write_smiles(mol, canonical_ranks(mol))


def canonicalize(text: str) -> str:
    """Parse, perceive, keep the largest fragment and write canonical SMILES."""
    return write_canonical_smiles(largest_fragment(perceive(parse_smiles(text))))
