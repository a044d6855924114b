"""Test SMILES parsing, perception and canonicalization."""

import numpy as np
import pytest
from chem.canon import canonical_ranks, canonicalize, write_canonical_smiles
from chem.graph import largest_fragment
from chem.perception import perceive
from chem.smiles import parse_smiles, write_smiles
from data_types.molecule import BondOrder, Hybridization
from errors import SmilesSyntaxError, ValenceError
from harness.corpus import load_seed_corpus


def test_parse_ethanol() -> None:
    mol = parse_smiles("CCO")

    assert [atom.element for atom in mol.atoms] == ["C", "C", "O"]
    assert len(mol.bonds) == 2
    assert all(bond.order is BondOrder.SINGLE for bond in mol.bonds)


def test_parse_benzene_ring() -> None:
    mol = parse_smiles("c1ccccc1")

    assert mol.n_atoms == 6
    assert all(atom.aromatic for atom in mol.atoms)
    assert len(mol.bonds) == 6
    assert all(bond.order is BondOrder.AROMATIC for bond in mol.bonds)


def test_parse_bracket_ammonium() -> None:
    mol = parse_smiles("[NH4+]")

    assert mol.n_atoms == 1
    assert mol.atoms[0].formal_charge == 1
    assert mol.atoms[0].explicit_h == 4
    assert not mol.bonds


def test_parse_branches() -> None:
    mol = perceive(parse_smiles("C(C)(C)(C)C"))

    assert mol.atoms[0].degree == 4


def test_parse_two_digit_ring_closure() -> None:
    mol = parse_smiles("C%10CCCCC%10")

    assert mol.n_atoms == 6
    assert len(mol.bonds) == 6


def test_parse_discards_stereo_and_isotopes() -> None:
    plain = canonicalize("CC(O)C=CC")
    marked = canonicalize("C[C@@H](O)/C=C/[13CH3]")

    assert plain == marked


def test_parse_fragments_are_disjoint() -> None:
    mol = parse_smiles("CCO.Cl")

    assert mol.n_atoms == 4
    assert len(mol.bonds) == 2


@pytest.mark.parametrize(
    "text",
    ["", "C(C", "CC)", "C1CC", "CX", "C=", "[Xx]", "C C", "(C)C", "C1CC11"],
)
def test_parse_syntax_errors(text: str) -> None:
    with pytest.raises(SmilesSyntaxError) as info:
        parse_smiles(text)

    assert info.value.reason == "SyntaxError"


def test_parse_valence_error() -> None:
    with pytest.raises(ValenceError):
        parse_smiles("C(C)(C)(C)(C)C")


def test_perceive_ethanol_hydrogens() -> None:
    mol = perceive(parse_smiles("CCO"))

    assert [atom.implicit_h for atom in mol.atoms] == [3, 2, 1]
    assert all(atom.hybridization is Hybridization.SP3 for atom in mol.atoms)


def test_perceive_benzene() -> None:
    mol = perceive(parse_smiles("c1ccccc1"))

    assert all(atom.implicit_h == 1 for atom in mol.atoms)
    assert all(atom.hybridization is Hybridization.SP2 for atom in mol.atoms)
    assert all(atom.in_ring for atom in mol.atoms)
    assert all(atom.total_valence == pytest.approx(4.0) for atom in mol.atoms)


def test_perceive_nitrile_is_sp() -> None:
    mol = perceive(parse_smiles("C#N"))

    assert all(atom.hybridization is Hybridization.SP for atom in mol.atoms)


def test_perceive_does_not_modify_input() -> None:
    mol = parse_smiles("CCO")
    perceive(mol)

    assert not mol.perceived
    assert all(atom.implicit_h == 0 for atom in mol.atoms)


def test_perceive_marks_kekule_benzene_aromatic() -> None:
    mol = perceive(parse_smiles("C1=CC=CC=C1"))

    assert all(atom.aromatic for atom in mol.atoms)
    assert all(bond.order is BondOrder.AROMATIC for bond in mol.bonds)


def test_largest_fragment() -> None:
    salt = largest_fragment(perceive(parse_smiles("CCO.Cl")))
    water = largest_fragment(perceive(parse_smiles("O.O")))
    ethanol = perceive(parse_smiles("CCO"))

    assert [atom.element for atom in salt.atoms] == ["C", "C", "O"]
    assert water.n_atoms == 1
    assert largest_fragment(ethanol) is ethanol


def test_canonical_ranks_are_a_permutation() -> None:
    benzene = perceive(parse_smiles("c1ccccc1"))
    ethanol = perceive(parse_smiles("CCO"))

    assert sorted(canonical_ranks(benzene)) == list(range(6))
    assert len(set(canonical_ranks(ethanol))) == 3


@pytest.mark.parametrize(
    "spellings",
    [
        ("CCO", "OCC", "C(O)C"),
        ("Cc1ccccc1", "c1ccc(C)cc1", "c1ccccc1C"),
        ("c1ccccc1", "C1=CC=CC=C1"),
        ("CC(=O)Oc1ccccc1C(=O)O", "OC(=O)c1ccccc1OC(C)=O"),
        ("c1ccncc1", "n1ccccc1"),
    ],
)
def test_canonical_smiles_ignores_spelling(spellings: tuple[str, ...]) -> None:
    assert len({canonicalize(text) for text in spellings}) == 1


def test_canonical_smiles_is_a_fixed_point_on_seed_corpus() -> None:
    for smiles in load_seed_corpus():
        once = canonicalize(smiles)

        assert canonicalize(once) == once, smiles


def test_canonical_output_reparses_to_same_formula() -> None:
    mol = perceive(parse_smiles("CC(C)Cc1ccc(cc1)C(C)C(=O)O"))
    again = perceive(parse_smiles(write_canonical_smiles(mol)))

    assert sorted(a.element for a in again.atoms) == sorted(
        a.element for a in mol.atoms
    )
    assert len(again.bonds) == len(mol.bonds)
    assert sum(a.total_h for a in again.atoms) == sum(a.total_h for a in mol.atoms)


def test_explicit_hydrogens_fold_into_counts() -> None:
    assert canonicalize("[H]C([H])([H])[H]") == "C"
    assert canonicalize("[H]OC([H])([H])C") == canonicalize("CCO")
    assert parse_smiles("[H][H]").n_atoms == 2


def test_any_emission_order_round_trips() -> None:
    rng = np.random.default_rng(11)
    corpus = load_seed_corpus()
    assert len(corpus) >= 100
    for smiles in corpus:
        mol = largest_fragment(perceive(parse_smiles(smiles)))
        canonical = write_canonical_smiles(mol)
        assert canonicalize(canonical) == canonical, smiles

        for _ in range(20):
            emitted = write_smiles(mol, rng.permutation(mol.n_atoms).tolist())

            assert canonicalize(emitted) == canonical, (smiles, emitted)
