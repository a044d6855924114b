"""
Chemistry perception: implicit hydrogens, ring membership, aromatic
normalization of alternating six-rings, valence, and hybridization.
"""

from __future__ import annotations

import copy
from collections.abc import Iterable

import networkx as nx
from chem.elements import allowed_valences, lookup
from chem.graph import ordered_rings, to_networkx
from data_types.molecule import BondOrder, Hybridization, MolGraph
from errors import ValenceError

# aromatic atoms of these elements donate one electron to the ring pi system
PI_DONORS = frozenset({"B", "C", "N", "P"})
KEKULE_ELEMENTS = frozenset({"C", "N"})


def implicit_hydrogens(
    element: str,
    formal_charge: int,
    aromatic: bool,
    bond_orders: Iterable[BondOrder],
    explicit_h: int = 0,
) -> int:
    """
    Hydrogens needed to reach the smallest allowed valence.

    Aromatic bonds count 1 each; an aromatic B/C/N/P also counts one electron
    for the ring when that still leaves a valid valence.

    Raises:
        ValenceError: the bond-order sum exceeds every allowed valence.
    """
    valences = allowed_valences(element, formal_charge)
    if not valences:
        return 0
    orders = list(bond_orders)
    used = explicit_h + sum(
        1 if order is BondOrder.AROMATIC else int(order) for order in orders
    )
    if aromatic and element in PI_DONORS:
        for valence in valences:
            if valence >= used + 1:
                return valence - used - 1
    for valence in valences:
        if valence >= used:
            return valence - used
    raise ValenceError(
        f"{element} (charge {formal_charge}) with bond-order sum {used}"
        f" exceeds allowed valences {valences}"
    )


def _mark_rings(mol: MolGraph) -> None:
    graph = to_networkx(mol)
    bridges = {(min(a, b), max(a, b)) for a, b in nx.bridges(graph)}
    for atom in mol.atoms:
        atom.in_ring = False
    for bond in mol.bonds:
        bond.in_ring = (min(bond.a, bond.b), max(bond.a, bond.b)) not in bridges
        if bond.in_ring:
            mol.atoms[bond.a].in_ring = True
            mol.atoms[bond.b].in_ring = True


def _normalize_kekule_rings(mol: MolGraph) -> None:
    """Mark six-rings of C/N with alternating single/double bonds aromatic."""
    rings = [ring for ring in ordered_rings(mol) if len(ring) == 6]
    if not rings:
        return
    lookup_bonds = mol.bond_lookup()
    changed = True
    while changed:
        changed = False
        for ring in rings:
            if any(mol.atoms[i].element not in KEKULE_ELEMENTS for i in ring):
                continue
            ring_bonds = [
                lookup_bonds[(min(a, b), max(a, b))]
                for a, b in zip(ring, ring[1:] + ring[:1], strict=True)
            ]
            if all(bond.order is BondOrder.AROMATIC for bond in ring_bonds):
                continue
            # aromatic bonds already assigned match either phase
            alternates = any(
                all(
                    bond.order is BondOrder.AROMATIC
                    or bond.order
                    is (BondOrder.DOUBLE if k % 2 == phase else BondOrder.SINGLE)
                    for k, bond in enumerate(ring_bonds)
                )
                for phase in (0, 1)
            )
            if not alternates:
                continue
            for bond in ring_bonds:
                bond.order = BondOrder.AROMATIC
            for index in ring:
                mol.atoms[index].aromatic = True
            changed = True


def _drop_acyclic_aromaticity(mol: MolGraph) -> None:
    for bond in mol.bonds:
        if bond.order is BondOrder.AROMATIC and not bond.in_ring:
            bond.order = BondOrder.SINGLE
    for atom in mol.atoms:
        if atom.aromatic and not atom.in_ring:
            atom.aromatic = False


def _hybridization(element: str, orders: list[BondOrder]) -> Hybridization:
    info = lookup(element)
    if info is None or not info.main_group:
        return Hybridization.OTHER
    doubles = sum(1 for order in orders if order is BondOrder.DOUBLE)
    if BondOrder.TRIPLE in orders or doubles >= 2:
        return Hybridization.SP
    if doubles or BondOrder.AROMATIC in orders:
        return Hybridization.SP2
    return Hybridization.SP3


def perceive(mol: MolGraph) -> MolGraph:
    """
    Fill in the chemistry-level attributes of a parsed graph.

    Returns a perceived copy; the input graph is not modified.

    Args:
        mol: graph produced by ``parse_smiles``.

    Returns:
        MolGraph: copy with ring flags, aromatic normalization, implicit and
        total hydrogens, heavy degree, total valence and hybridization set.

    Raises:
        ValenceError: an atom exceeds the largest valence of its element.
    """
    result = copy.deepcopy(mol)
    _mark_rings(result)
    _normalize_kekule_rings(result)
    _drop_acyclic_aromaticity(result)

    incident: list[list[BondOrder]] = [[] for _ in result.atoms]
    for bond in result.bonds:
        incident[bond.a].append(bond.order)
        incident[bond.b].append(bond.order)

    for index, atom in enumerate(result.atoms):
        orders = incident[index]
        if atom.bracket:
            atom.implicit_h = 0
            valences = allowed_valences(atom.element, atom.formal_charge)
            used = atom.explicit_h + sum(
                1 if order is BondOrder.AROMATIC else int(order) for order in orders
            )
            if valences and used > max(valences):
                raise ValenceError(
                    f"atom {index} ({atom.element}) has valence {used}"
                    f" > {max(valences)} in {mol.source_smiles!r}"
                )
        else:
            atom.implicit_h = implicit_hydrogens(
                atom.element, atom.formal_charge, atom.aromatic, orders, atom.explicit_h
            )
        atom.degree = sum(
            1 for nbr in result.adjacency[index] if result.atoms[nbr].atomic_number > 1
        )
        atom.total_valence = (
            sum(order.valence_contribution for order in orders) + atom.total_h
        )
        atom.hybridization = _hybridization(atom.element, orders)

    result.perceived = True
    return result
