"""Molecule builders shared by the tests."""

import numpy as np
from chem.graph import largest_fragment
from chem.perception import perceive
from chem.smiles import parse_smiles
from data_types.molecule import Atom, BondOrder, MolGraph


def perceived(smiles: str) -> MolGraph:
    return largest_fragment(perceive(parse_smiles(smiles)))


def random_carbon_graph(
    rng: np.random.Generator, n_atoms: int, extra_edges: int = 0
) -> MolGraph:
    """Random connected all-carbon skeleton with heavy degree <= 4."""
    mol = MolGraph()
    for _ in range(n_atoms):
        mol.add_atom(Atom(element="C", atomic_number=6))
    for index in range(1, n_atoms):
        candidates = [k for k in range(index) if len(mol.adjacency[k]) < 4]
        mol.add_bond(int(rng.choice(candidates)), index, BondOrder.SINGLE)
    for _ in range(extra_edges):
        a, b = (int(k) for k in rng.choice(n_atoms, size=2, replace=False))
        if (
            mol.bond_between(a, b) is None
            and len(mol.adjacency[a]) < 4
            and len(mol.adjacency[b]) < 4
        ):
            mol.add_bond(a, b, BondOrder.SINGLE)
    return perceive(mol)
