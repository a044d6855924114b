"""Test graph distances, descriptors and label normalization."""

import json
import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from chem.graph import all_pairs_distances
from data_types.molecule import MolGraph
from errors import EmptyDataset, NonFiniteInput, RegistryMismatch
from labels.descriptors import (
    DESCRIPTOR_NAMES,
    compute_descriptors,
    export_label_matrix,
    label_matrix,
    resolve_names,
)
from labels.normalization import (
    NormStats,
    apply_normalizer,
    fit_normalizer,
    invert_normalizer,
)
from tests.helpers import random_carbon_graph


def floyd_warshall(mol: MolGraph) -> np.ndarray:
    n = mol.n_atoms
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for bond in mol.bonds:
        dist[bond.a, bond.b] = dist[bond.b, bond.a] = 1.0
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i, k] + dist[k, j] < dist[i, j]:
                    dist[i, j] = dist[i, k] + dist[k, j]
    return dist


def brute_force_descriptors(mol: MolGraph) -> dict[str, float]:
    dist = floyd_warshall(mol)
    degree = [len(mol.adjacency[i]) for i in range(mol.n_atoms)]
    edges = [(bond.a, bond.b) for bond in mol.bonds]
    sums = dist.sum(axis=1)
    mu = len(edges) - mol.n_atoms + 1
    return {
        "wiener": dist.sum() / 2,
        "randic_chi0": sum(d**-0.5 for d in degree if d),
        "randic_chi1": sum((degree[a] * degree[b]) ** -0.5 for a, b in edges),
        "balaban_j": len(edges)
        / (mu + 1)
        * sum((sums[a] * sums[b]) ** -0.5 for a, b in edges),
        "graph_diameter": dist.max(),
        "graph_radius": dist.max(axis=1).min(),
    }


def test_distances_of_propane_and_benzene(
    mol_from: Callable[[str], MolGraph],
) -> None:
    propane = all_pairs_distances(mol_from("CCC"))
    benzene = all_pairs_distances(mol_from("c1ccccc1"))

    assert propane.max() == 2
    assert benzene.max() == 3
    assert np.array_equal(benzene, benzene.T)
    assert not np.any(np.diag(benzene))


def test_distances_match_floyd_warshall_on_random_trees(
    rng: np.random.Generator,
) -> None:
    for _ in range(30):
        mol = random_carbon_graph(rng, int(rng.integers(2, 13)))

        assert np.array_equal(all_pairs_distances(mol), floyd_warshall(mol))


def test_topological_descriptors_match_brute_force(rng: np.random.Generator) -> None:
    names = list(brute_force_descriptors(random_carbon_graph(rng, 3)))
    for _ in range(100):
        n_atoms = int(rng.integers(2, 13))
        mol = random_carbon_graph(rng, n_atoms, extra_edges=int(rng.integers(0, 3)))
        computed = compute_descriptors(mol, names).as_dict()

        for name, expected in brute_force_descriptors(mol).items():
            assert computed[name] == pytest.approx(expected, abs=1e-9), name


def test_propane(mol_from: Callable[[str], MolGraph]) -> None:
    values = compute_descriptors(mol_from("CCC")).as_dict()

    assert values["wiener"] == 4
    assert values["zagreb_m1"] == 6
    assert values["randic_chi1"] == pytest.approx(2 / math.sqrt(2))


def test_butane_balaban_j(mol_from: Callable[[str], MolGraph]) -> None:
    values = compute_descriptors(mol_from("CCCC")).as_dict()

    assert values["balaban_j"] == pytest.approx(3 * (2 / math.sqrt(24) + 1 / 4))
    assert round(values["balaban_j"], 4) == 1.9747


def test_ethanol_lipinski_and_mass(mol_from: Callable[[str], MolGraph]) -> None:
    values = compute_descriptors(mol_from("CCO")).as_dict()

    assert values["hbd"] == 1
    assert values["hba"] == 1
    assert values["molecular_weight"] == pytest.approx(46.069, abs=1e-6)
    assert values["total_h_count"] == 6


def test_single_atom_degenerate_values(mol_from: Callable[[str], MolGraph]) -> None:
    values = compute_descriptors(mol_from("C")).as_dict()

    assert values["wiener"] == 0
    assert values["ring_count"] == 0
    assert values["graph_diameter"] == 0
    assert values["balaban_j"] == 0
    assert values["kier_kappa2"] == 0
    assert values["randic_chi1"] == 0


def test_kappa1_of_path_graph(mol_from: Callable[[str], MolGraph]) -> None:
    for n in range(2, 9):
        assert compute_descriptors(mol_from("C" * n), ["kier_kappa1"]).values[
            0
        ] == pytest.approx(n)


@pytest.mark.parametrize(
    ("smiles", "expected"),
    [("CCC", 0.0), ("CCCC", 4.0), ("CCCCC", 4.0), ("CC(C)(C)C", 0.0)],
)
def test_kappa3(
    mol_from: Callable[[str], MolGraph], smiles: str, expected: float
) -> None:
    values = compute_descriptors(mol_from(smiles), ["kier_kappa3"]).values
    assert values[0] == pytest.approx(expected)


def test_benzene_constitutional(mol_from: Callable[[str], MolGraph]) -> None:
    values = compute_descriptors(mol_from("c1ccccc1")).as_dict()

    assert values["ring_count"] == 1
    assert values["aromatic_atom_count"] == 6
    assert values["fraction_csp3"] == 0
    assert values["rotatable_bond_count"] == 0


def test_descriptors_ignore_atom_order(mol_from: Callable[[str], MolGraph]) -> None:
    first = compute_descriptors(mol_from("CC(C)Cc1ccc(cc1)C(C)C(=O)O")).values
    second = compute_descriptors(mol_from("OC(=O)C(C)c1ccc(CC(C)C)cc1")).values

    np.testing.assert_allclose(first, second, rtol=0, atol=1e-12)


def test_resolve_names() -> None:
    assert resolve_names() == DESCRIPTOR_NAMES
    assert resolve_names(3) == DESCRIPTOR_NAMES[:3]
    assert resolve_names(["wiener", "hbd"]) == ("hbd", "wiener")
    with pytest.raises(RegistryMismatch):
        resolve_names(["logp"])
    with pytest.raises(RegistryMismatch):
        resolve_names(len(DESCRIPTOR_NAMES) + 1)


def test_export_label_matrix(
    tmp_path: Path, mol_from: Callable[[str], MolGraph]
) -> None:
    smiles = ["CCO", "CCC"]
    matrix = label_matrix([mol_from(s) for s in smiles], 4)

    names = DESCRIPTOR_NAMES[:4]
    out = export_label_matrix(tmp_path / "labels.csv", smiles, matrix, names)
    frame = pd.read_csv(out)

    assert list(frame.columns) == ["smiles", *DESCRIPTOR_NAMES[:4]]
    np.testing.assert_allclose(frame.iloc[:, 1:].to_numpy(), matrix)


def test_fit_normalizer() -> None:
    stats = fit_normalizer(np.array([[1.0, 2.0], [3.0, 2.0], [5.0, 2.0]]), ["a", "b"])

    assert stats.minimum == [1.0, 2.0]
    assert stats.maximum == [5.0, 2.0]


def test_apply_and_invert_normalizer() -> None:
    stats = NormStats(names=["a"], minimum=[1.0], maximum=[5.0])

    assert apply_normalizer(np.array([3.0]), stats)[0] == 0.5
    assert apply_normalizer(np.array([7.0]), stats)[0] == 1.0
    assert apply_normalizer(np.array([-1.0]), stats)[0] == 0.0
    x = np.array([[1.0], [2.2], [4.9]])
    np.testing.assert_allclose(
        invert_normalizer(apply_normalizer(x, stats), stats), x, atol=1e-12
    )


def test_constant_column_maps_to_zero() -> None:
    stats = fit_normalizer(np.array([[2.0], [2.0]]), ["a"])

    assert apply_normalizer(np.array([[2.0], [9.0]]), stats).tolist() == [[0.0], [0.0]]


def test_normalized_fitting_matrix_in_unit_range(
    mol_from: Callable[[str], MolGraph],
) -> None:
    matrix = label_matrix([mol_from(s) for s in ["CCO", "c1ccccc1O", "CC(=O)N", "C"]])
    scaled = apply_normalizer(matrix, fit_normalizer(matrix))

    assert scaled.min() >= 0.0
    assert scaled.max() <= 1.0


def test_normalizer_errors(mol_from: Callable[[str], MolGraph]) -> None:
    with pytest.raises(EmptyDataset):
        fit_normalizer(np.zeros((0, 3)))
    with pytest.raises(NonFiniteInput):
        fit_normalizer(np.array([[1.0, np.nan]]), ["a", "b"])

    stats = fit_normalizer(np.array([[1.0, 2.0]]), ["hbd", "hba"])
    with pytest.raises(RegistryMismatch):
        apply_normalizer(np.array([1.0, 2.0, 3.0]), stats)
    vector = compute_descriptors(mol_from("CCO"), ["wiener", "hbd"])
    with pytest.raises(RegistryMismatch):
        apply_normalizer(vector, stats)


def test_norm_stats_save_load(tmp_path: Path) -> None:
    stats = fit_normalizer(np.array([[1.0], [4.0]]), ["wiener"])
    path = stats.save(tmp_path / "norm.json")

    assert json.loads(path.read_text())["names"] == ["wiener"]
    assert NormStats.load(path) == stats
