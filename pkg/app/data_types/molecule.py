"""Molecular graph data types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence_contribution(self) -> float:
        """Bond order as counted in total valence (aromatic counts 1.5)."""
        return 1.5 if self is BondOrder.AROMATIC else float(self.value)


class Hybridization(Enum):
    SP = "SP"
    SP2 = "SP2"
    SP3 = "SP3"
    OTHER = "OTHER"


@dataclass(slots=True)
class Atom:
    element: str
    atomic_number: int
    formal_charge: int = 0
    explicit_h: int = 0
    implicit_h: int = 0
    aromatic: bool = False
    bracket: bool = False
    in_ring: bool = False
    degree: int = 0
    total_valence: float = 0.0
    hybridization: Hybridization = Hybridization.OTHER
    partial_charge: float = 0.0

    @property
    def total_h(self) -> int:
        return self.explicit_h + self.implicit_h


@dataclass(slots=True)
class Bond:
    a: int
    b: int
    order: BondOrder = BondOrder.SINGLE
    in_ring: bool = False

    def other(self, index: int) -> int:
        return self.b if index == self.a else self.a


@dataclass(slots=True)
class MolGraph:
    """Atoms, bonds and per-atom neighbor lists of one molecule."""

    atoms: list[Atom] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    adjacency: list[list[int]] = field(default_factory=list)
    source_smiles: str = ""
    perceived: bool = False

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def add_atom(self, atom: Atom) -> int:
        self.atoms.append(atom)
        self.adjacency.append([])
        return len(self.atoms) - 1

    def add_bond(self, a: int, b: int, order: BondOrder) -> Bond:
        bond = Bond(a=a, b=b, order=order)
        self.bonds.append(bond)
        self.adjacency[a].append(b)
        self.adjacency[b].append(a)
        return bond

    def bond_between(self, a: int, b: int) -> Bond | None:
        for bond in self.bonds:
            if (bond.a == a and bond.b == b) or (bond.a == b and bond.b == a):
                return bond
        return None

    def bond_lookup(self) -> dict[tuple[int, int], Bond]:
        """Map of (min, max) atom index pairs to bonds."""
        return {(min(b.a, b.b), max(b.a, b.b)): b for b in self.bonds}

    def incident_bonds(self, index: int) -> list[Bond]:
        return [bond for bond in self.bonds if index in (bond.a, bond.b)]

    def heavy_atom_count(self) -> int:
        return sum(1 for atom in self.atoms if atom.atomic_number > 1)
