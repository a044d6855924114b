"""Test Gasteiger partial charges."""

from collections.abc import Callable

import numpy as np
import pytest
from chem.gasteiger import gasteiger_charges, with_partial_charges
from data_types.molecule import MolGraph
from errors import MissingParameter
from harness.corpus import load_seed_corpus


def test_charges_sum_to_formal_charge(mol_from: Callable[[str], MolGraph]) -> None:
    for smiles in [*load_seed_corpus()[:40], "[NH4+]", "CC(=O)[O-]", "C[N+](C)(C)C"]:
        mol = mol_from(smiles)
        total = sum(atom.formal_charge for atom in mol.atoms)

        assert np.sum(gasteiger_charges(mol)) == pytest.approx(total, abs=1e-9)


def test_methane_carbon_is_negative(mol_from: Callable[[str], MolGraph]) -> None:
    charges = gasteiger_charges(mol_from("C"))

    assert charges.shape == (1,)
    assert charges[0] < 0


def test_ethanol_oxygen_most_negative(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CCO")
    charges = gasteiger_charges(mol)

    assert mol.atoms[int(np.argmin(charges))].element == "O"


def test_carbonyl_carbon_positive(mol_from: Callable[[str], MolGraph]) -> None:
    charges = gasteiger_charges(mol_from("CC(C)=O"))

    assert charges[1] > 0
    assert charges[3] < 0


def test_missing_parameters(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("C[Se]C")

    with pytest.raises(MissingParameter):
        gasteiger_charges(mol)

    zeroed = with_partial_charges(mol, zero_on_missing=True)
    assert all(atom.partial_charge == 0.0 for atom in zeroed.atoms)


def test_with_partial_charges_copies(mol_from: Callable[[str], MolGraph]) -> None:
    mol = mol_from("CCO")
    charged = with_partial_charges(mol)

    assert all(atom.partial_charge == 0.0 for atom in mol.atoms)
    assert [atom.partial_charge for atom in charged.atoms] == pytest.approx(
        gasteiger_charges(mol).tolist()
    )
