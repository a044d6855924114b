"""
Rule-based molecular descriptors used as weak-supervision labels.

The registry spans constitutional counts and topological indices computed on
the heavy-atom graph. Its order is fixed and versioned; label matrices, norm
stats and pretrained models all record the version they were built against.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd
from chem.elements import lookup
from chem.graph import all_pairs_distances, to_networkx
from data_types.molecule import BondOrder, Hybridization, MolGraph
from errors import NoHeavyAtoms, RegistryMismatch
from log_tools import Logger

REGISTRY_VERSION = "chemnet-descriptors-v1"

DESCRIPTOR_NAMES: tuple[str, ...] = (
    "molecular_weight",
    "heavy_atom_count",
    "heteroatom_count",
    "total_h_count",
    "ring_count",
    "aromatic_atom_count",
    "rotatable_bond_count",
    "hbd",
    "hba",
    "net_formal_charge",
    "fraction_csp3",
    "wiener",
    "zagreb_m1",
    "zagreb_m2",
    "randic_chi0",
    "randic_chi1",
    "balaban_j",
    "kier_kappa1",
    "kier_kappa2",
    "kier_kappa3",
    "graph_diameter",
    "graph_radius",
)

HYDROGEN_MASS = 1.008
LIPINSKI_ATOMS = frozenset({"N", "O"})


@dataclass(frozen=True, slots=True)
class DescriptorVector:
    values: np.ndarray
    names: tuple[str, ...] = DESCRIPTOR_NAMES
    registry_version: str = REGISTRY_VERSION

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist(), strict=True))


class _HeavyGraph:
    """Heavy-atom view of a perceived molecule with its distance matrix."""

    def __init__(self, mol: MolGraph) -> None:
        self.mol = mol
        self.heavy = [i for i, atom in enumerate(mol.atoms) if atom.atomic_number > 1]
        if not self.heavy:
            raise NoHeavyAtoms(f"no heavy atoms in {mol.source_smiles!r}")
        self.degree = np.array(
            [mol.atoms[i].degree for i in self.heavy], dtype=np.float64
        )
        position = {atom: k for k, atom in enumerate(self.heavy)}
        self.edges = np.array(
            [
                (position[bond.a], position[bond.b])
                for bond in mol.bonds
                if bond.a in position and bond.b in position
            ],
            dtype=np.int64,
        ).reshape(-1, 2)
        self.distances = all_pairs_distances(mol).astype(np.float64)

    @property
    def n_atoms(self) -> int:
        return len(self.heavy)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def cyclomatic(self) -> int:
        return self.n_edges - self.n_atoms + 1


def _molecular_weight(g: _HeavyGraph) -> float:
    total = 0.0
    for atom in g.mol.atoms:
        info = lookup(atom.element)
        assert info is not None
        total += info.mass + atom.total_h * HYDROGEN_MASS
    return total


def _total_h(g: _HeavyGraph) -> float:
    bound = sum(atom.total_h for atom in g.mol.atoms)
    free = sum(1 for atom in g.mol.atoms if atom.atomic_number == 1)
    return float(bound + free)


def _rotatable_bonds(g: _HeavyGraph) -> float:
    atoms = g.mol.atoms
    return float(
        sum(
            1
            for bond in g.mol.bonds
            if bond.order is BondOrder.SINGLE
            and not bond.in_ring
            and atoms[bond.a].atomic_number > 1
            and atoms[bond.b].atomic_number > 1
            and atoms[bond.a].degree >= 2
            and atoms[bond.b].degree >= 2
        )
    )


def _fraction_csp3(g: _HeavyGraph) -> float:
    carbons = [atom for atom in g.mol.atoms if atom.element == "C"]
    if not carbons:
        return 0.0
    sp3 = sum(1 for atom in carbons if atom.hybridization is Hybridization.SP3)
    return sp3 / len(carbons)


def _edge_products(g: _HeavyGraph) -> np.ndarray:
    if not g.n_edges:
        return np.zeros(0)
    return g.degree[g.edges[:, 0]] * g.degree[g.edges[:, 1]]


def _randic_chi0(g: _HeavyGraph) -> float:
    connected = g.degree[g.degree > 0]
    return float(np.sum(connected**-0.5))


def _randic_chi1(g: _HeavyGraph) -> float:
    return float(np.sum(_edge_products(g) ** -0.5))


def _balaban_j(g: _HeavyGraph) -> float:
    if not g.n_edges:
        return 0.0
    row_sums = g.distances.sum(axis=1)
    products = row_sums[g.edges[:, 0]] * row_sums[g.edges[:, 1]]
    return float(g.n_edges / (g.cyclomatic + 1) * np.sum(products**-0.5))


def _path_count_2(g: _HeavyGraph) -> float:
    return float(np.sum(g.degree * (g.degree - 1) / 2))


def _path_count_3(g: _HeavyGraph) -> float:
    if not g.n_edges:
        return 0.0
    ends = (g.degree[g.edges[:, 0]] - 1) * (g.degree[g.edges[:, 1]] - 1)
    graph = to_networkx(g.mol, heavy_only=True)
    triangles = sum(nx.triangles(graph).values()) // 3
    return float(np.sum(ends) - 3 * triangles)


def _kappa1(g: _HeavyGraph) -> float:
    a, p1 = g.n_atoms, g.n_edges
    return a * (a - 1) ** 2 / p1**2 if p1 else 0.0


def _kappa2(g: _HeavyGraph) -> float:
    a, p2 = g.n_atoms, _path_count_2(g)
    if a < 3 or p2 == 0:
        return 0.0
    return (a - 1) * (a - 2) ** 2 / p2**2


def _kappa3(g: _HeavyGraph) -> float:
    a, p3 = g.n_atoms, _path_count_3(g)
    if a < 4 or p3 <= 0:
        return 0.0
    if a % 2:
        return (a - 1) * (a - 3) ** 2 / p3**2
    return (a - 3) * (a - 2) ** 2 / p3**2


DESCRIPTORS: dict[str, Callable[[_HeavyGraph], float]] = {
    "molecular_weight": _molecular_weight,
    "heavy_atom_count": lambda g: float(g.n_atoms),
    "heteroatom_count": lambda g: float(
        sum(1 for atom in g.mol.atoms if atom.element not in ("C", "H"))
    ),
    "total_h_count": _total_h,
    "ring_count": lambda g: float(g.cyclomatic),
    "aromatic_atom_count": lambda g: float(
        sum(1 for atom in g.mol.atoms if atom.aromatic)
    ),
    "rotatable_bond_count": _rotatable_bonds,
    "hbd": lambda g: float(
        sum(
            1
            for atom in g.mol.atoms
            if atom.element in LIPINSKI_ATOMS and atom.total_h >= 1
        )
    ),
    "hba": lambda g: float(
        sum(1 for atom in g.mol.atoms if atom.element in LIPINSKI_ATOMS)
    ),
    "net_formal_charge": lambda g: float(
        sum(atom.formal_charge for atom in g.mol.atoms)
    ),
    "fraction_csp3": _fraction_csp3,
    "wiener": lambda g: float(g.distances.sum() / 2),
    "zagreb_m1": lambda g: float(np.sum(g.degree**2)),
    "zagreb_m2": lambda g: float(np.sum(_edge_products(g))),
    "randic_chi0": _randic_chi0,
    "randic_chi1": _randic_chi1,
    "balaban_j": _balaban_j,
    "kier_kappa1": _kappa1,
    "kier_kappa2": _kappa2,
    "kier_kappa3": _kappa3,
    "graph_diameter": lambda g: float(g.distances.max()),
    "graph_radius": lambda g: float(g.distances.max(axis=1).min()),
}


def resolve_names(names: Sequence[str] | int | None = None) -> tuple[str, ...]:
    """
    Normalize a descriptor selection to registry names in registry order.

    ``None`` selects the whole registry; an integer selects that many
    descriptors from the front of the registry.
    """
    if names is None:
        return DESCRIPTOR_NAMES
    if isinstance(names, int):
        if not 1 <= names <= len(DESCRIPTOR_NAMES):
            raise RegistryMismatch(
                f"descriptor count must be in 1..{len(DESCRIPTOR_NAMES)}"
            )
        return DESCRIPTOR_NAMES[:names]
    unknown = [name for name in names if name not in DESCRIPTORS]
    if unknown:
        raise RegistryMismatch(f"unknown descriptors {unknown}")
    wanted = set(names)
    return tuple(name for name in DESCRIPTOR_NAMES if name in wanted)


def compute_descriptors(
    mol: MolGraph, names: Sequence[str] | int | None = None
) -> DescriptorVector:
    """
    Descriptor vector for one perceived, connected molecule.

    Args:
        mol: perceived molecular graph (largest fragment).
        names: optional registry subset; see ``resolve_names``.

    Returns:
        DescriptorVector: values in registry order.

    Raises:
        NoHeavyAtoms: the molecule has no heavy atom.
    """
    selected = resolve_names(names)
    graph = _HeavyGraph(mol)
    values = np.array([DESCRIPTORS[name](graph) for name in selected])
    return DescriptorVector(values=values, names=selected)


def label_matrix(
    mols: Iterable[MolGraph], names: Sequence[str] | int | None = None
) -> np.ndarray:
    """Stack descriptor vectors into an N x D float64 matrix."""
    selected = resolve_names(names)
    rows = [compute_descriptors(mol, selected).values for mol in mols]
    if not rows:
        return np.zeros((0, len(selected)))
    return np.vstack(rows)


@Logger.log
def export_label_matrix(
    path: str | Path,
    smiles: Sequence[str],
    matrix: np.ndarray,
    names: Sequence[str] | None = None,
) -> Path:
    """Write a label matrix as CSV: a ``smiles`` column then one per descriptor."""
    selected = resolve_names(names)
    frame = pd.DataFrame(matrix, columns=list(selected))
    frame.insert(0, "smiles", list(smiles))
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, float_format="%.10g")
    return out
