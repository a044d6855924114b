"""Graph algorithms over MolGraph, delegated to networkx."""

from __future__ import annotations

from dataclasses import replace

import networkx as nx
import numpy as np
from data_types.molecule import MolGraph


def to_networkx(mol: MolGraph, heavy_only: bool = False) -> nx.Graph:
    """Undirected networkx view; nodes are atom indices, edges carry ``order``."""
    graph = nx.Graph()
    keep = [
        i
        for i, atom in enumerate(mol.atoms)
        if not heavy_only or atom.atomic_number > 1
    ]
    graph.add_nodes_from(keep)
    kept = set(keep)
    for bond in mol.bonds:
        if bond.a in kept and bond.b in kept:
            graph.add_edge(bond.a, bond.b, order=bond.order)
    return graph


def _ring_cycle(mol: MolGraph, members: set[int]) -> list[int] | None:
    """Order ring members as a closed walk using only bonds inside the ring."""
    start = min(members)
    path = [start]
    on_path = {start}

    def extend() -> bool:
        current = path[-1]
        if len(path) == len(members):
            return start in mol.adjacency[current]
        for nbr in sorted(mol.adjacency[current]):
            if nbr in members and nbr not in on_path:
                path.append(nbr)
                on_path.add(nbr)
                if extend():
                    return True
                path.pop()
                on_path.discard(nbr)
        return False

    return path if extend() else None


def ordered_rings(mol: MolGraph) -> list[list[int]]:
    """
    Smallest set of smallest rings, each as an ordered atom cycle.

    Rings are sorted by size, then by their sorted member indices, and each
    cycle starts at its lowest index and proceeds to its lower-index neighbor.
    """
    rings: list[list[int]] = []
    for cycle in nx.minimum_cycle_basis(to_networkx(mol)):
        ordered = _ring_cycle(mol, set(cycle))
        if ordered is None:
            continue
        if len(ordered) > 2 and ordered[-1] < ordered[1]:
            ordered = [ordered[0], *reversed(ordered[1:])]
        rings.append(ordered)
    rings.sort(key=lambda ring: (len(ring), sorted(ring)))
    return rings


def all_pairs_distances(mol: MolGraph, heavy_only: bool = True) -> np.ndarray:
    """
    Hop-count distance matrix from a breadth-first search per source atom.

    Args:
        mol: connected molecular graph.
        heavy_only: restrict to heavy atoms (hydrogen atoms kept as graph nodes
            are dropped); rows follow ascending atom index.

    Returns:
        np.ndarray: symmetric integer matrix with zero diagonal; -1 marks
        pairs in different components.
    """
    graph = to_networkx(mol, heavy_only=heavy_only)
    if heavy_only and graph.number_of_nodes() == 0:
        graph = to_networkx(mol)
    nodes = sorted(graph.nodes)
    position = {node: i for i, node in enumerate(nodes)}
    distances = np.full((len(nodes), len(nodes)), -1, dtype=np.int64)
    for source, lengths in nx.all_pairs_shortest_path_length(graph):
        for target, hops in lengths.items():
            distances[position[source], position[target]] = hops
    return distances


def fragments(mol: MolGraph) -> list[list[int]]:
    """Connected components as sorted atom index lists, by first atom."""
    components = [sorted(c) for c in nx.connected_components(to_networkx(mol))]
    return sorted(components, key=lambda component: component[0])


def subgraph(mol: MolGraph, atom_indices: list[int]) -> MolGraph:
    """Copy of the induced subgraph, atoms renumbered in ascending order."""
    keep = sorted(atom_indices)
    remap = {old: new for new, old in enumerate(keep)}
    result = MolGraph(source_smiles=mol.source_smiles, perceived=mol.perceived)
    for old in keep:
        result.add_atom(replace(mol.atoms[old]))
    for bond in mol.bonds:
        if bond.a in remap and bond.b in remap:
            copied = result.add_bond(remap[bond.a], remap[bond.b], bond.order)
            copied.in_ring = bond.in_ring
    return result


def largest_fragment(mol: MolGraph) -> MolGraph:
    """
    Keep the connected component with the most heavy atoms.

    Ties go to the larger atomic-number sum, then to the component that occurs
    first in the input.
    """
    components = fragments(mol)
    if len(components) == 1:
        return mol

    def weight(component: list[int]) -> tuple[int, int]:
        heavy = [mol.atoms[i] for i in component if mol.atoms[i].atomic_number > 1]
        return len(heavy), sum(atom.atomic_number for atom in heavy)

    best = max(components, key=weight)  # max keeps the first of equal keys
    return subgraph(mol, best)
