"""
2D coordinates for molecule depiction.

Rings are placed as regular polygons (fused rings across their shared edge,
spiro rings pointing away from the placed ring), chains grow breadth-first in a
zig-zag, and a short force relaxation removes residual strain and overlaps.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from chem.graph import ordered_rings
from config import ConfigVars
from data_types.molecule import BondOrder, Hybridization, MolGraph
from errors import LayoutOverflow, NoHeavyAtoms

BOND_LENGTH = 1.5
RELAX_ITERATIONS = 200
RELAX_STEP = 0.1
MAX_DISPLACEMENT = 0.5
REPULSION_CUTOFF = 1.0
ZIGZAG_TURN = math.radians(60)


@dataclass(frozen=True, slots=True)
class Layout2D:
    """Coordinates of the heavy atoms; ``atoms[k]`` is the atom at ``coords[k]``."""

    coords: np.ndarray
    atoms: tuple[int, ...]

    def extent(self) -> tuple[float, float]:
        span = self.coords.max(axis=0) - self.coords.min(axis=0)
        return float(span[0]), float(span[1])


def _unit(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def _angle(vector: np.ndarray) -> float:
    return math.atan2(float(vector[1]), float(vector[0]))


def _ring_systems(rings: list[list[int]]) -> list[list[list[int]]]:
    """Group rings sharing at least one atom, keeping ring order."""
    systems: list[tuple[set[int], list[list[int]]]] = []
    for ring in rings:
        members = set(ring)
        merged = [s for s in systems if s[0] & members]
        for system in merged:
            systems.remove(system)
            members |= system[0]
        ring_list = [r for s in merged for r in s[1]] + [ring]
        ring_list.sort(key=rings.index)
        systems.append((members, ring_list))
    return [ring_list for _, ring_list in systems]


class _Builder:
    def __init__(self, mol: MolGraph) -> None:
        self.mol = mol
        self.heavy = [i for i, atom in enumerate(mol.atoms) if atom.atomic_number > 1]
        if not self.heavy:
            raise NoHeavyAtoms(f"nothing to lay out in {mol.source_smiles!r}")
        heavy_set = set(self.heavy)
        self.neighbors = {
            i: sorted(n for n in mol.adjacency[i] if n in heavy_set) for i in self.heavy
        }
        rings = [r for r in ordered_rings(mol) if set(r) <= heavy_set]
        self.systems = _ring_systems(rings)
        self.system_of = {
            atom: k
            for k, system in enumerate(self.systems)
            for ring in system
            for atom in ring
        }
        self.pos: dict[int, np.ndarray] = {}
        self.zigzag: dict[int, int] = {}
        self.bonds = mol.bond_lookup()

    # rings ---------------------------------------------------------------

    def _polygon(
        self, ring: list[int], anchor: int, center: np.ndarray, handedness: int
    ) -> None:
        n = len(ring)
        radius = BOND_LENGTH / (2 * math.sin(math.pi / n))
        start = ring.index(anchor)
        base = _angle(self.pos[anchor] - center)
        for k in range(1, n):
            atom = ring[(start + k) % n]
            if atom not in self.pos:
                theta = base + handedness * 2 * math.pi * k / n
                self.pos[atom] = center + radius * _unit(theta)

    def _place_first_ring(self, ring: list[int], anchor: int, outward: float) -> None:
        n = len(ring)
        radius = BOND_LENGTH / (2 * math.sin(math.pi / n))
        center = self.pos[anchor] + radius * _unit(outward)
        self._polygon(ring, anchor, center, handedness=1)

    def _place_fused(self, ring: list[int], a: int, b: int) -> None:
        """Build ``ring`` across the placed edge a-b, away from the placed atoms."""
        n = len(ring)
        pa, pb = self.pos[a], self.pos[b]
        midpoint = (pa + pb) / 2
        edge = pb - pa
        normal = np.array([-edge[1], edge[0]]) / (np.linalg.norm(edge) or 1.0)
        placed_center = np.mean([p for p in self.pos.values()], axis=0)
        if float(np.dot(midpoint - placed_center, normal)) < 0:
            normal = -normal
        apothem = BOND_LENGTH / (2 * math.tan(math.pi / n))
        center = midpoint + apothem * normal
        ia = ring.index(a)
        step = 1 if ring[(ia + 1) % n] == b else -1
        angle_a = _angle(pa - center)
        angle_b = _angle(pb - center)
        delta = (angle_b - angle_a + math.pi) % (2 * math.pi) - math.pi
        radius = BOND_LENGTH / (2 * math.sin(math.pi / n))
        for k in range(2, n):
            atom = ring[(ia + step * k) % n]
            if atom not in self.pos:
                self.pos[atom] = center + radius * _unit(angle_a + delta * k)

    def _place_spiro(self, ring: list[int], shared: int) -> None:
        others = [self.pos[n] for n in self.neighbors[shared] if n in self.pos]
        ref = np.mean(others, axis=0) if others else self.pos[shared] - _unit(0.0)
        self._place_first_ring(ring, shared, _angle(self.pos[shared] - ref))

    def place_ring_system(self, index: int, anchor: int, outward: float) -> None:
        rings = self.systems[index]
        first = next(ring for ring in rings if anchor in ring)
        self._place_first_ring(first, anchor, outward)
        done = {id(first)}
        while len(done) < len(rings):
            candidates = [r for r in rings if id(r) not in done]
            ring = max(candidates, key=lambda r: sum(a in self.pos for a in r))
            done.add(id(ring))
            n = len(ring)
            edge = next(
                (
                    (ring[k], ring[(k + 1) % n])
                    for k in range(n)
                    if ring[k] in self.pos and ring[(k + 1) % n] in self.pos
                ),
                None,
            )
            if edge is not None:
                self._place_fused(ring, *edge)
                continue
            shared = next((a for a in ring if a in self.pos), None)
            if shared is None:
                # disjoint from what is placed so far; hang it off the last ring
                shared = ring[0]
                self.pos[shared] = max(self.pos.values(), key=lambda p: p[0]) + (
                    BOND_LENGTH * _unit(0.0)
                )
            self._place_spiro(ring, shared)

    # chains --------------------------------------------------------------

    def _child_angles(self, atom: int, count: int) -> list[float]:
        placed = [self.pos[n] for n in self.neighbors[atom] if n in self.pos]
        if not placed:
            return [2 * math.pi * i / count for i in range(count)]
        here = self.pos[atom]
        if atom in self.system_of:
            outward = _angle(here - np.mean(placed, axis=0))
            return [
                outward + (i - (count - 1) / 2) * ZIGZAG_TURN for i in range(count)
            ]
        back = _angle(placed[0] - here)
        if count == 1:
            parent = next(n for n in self.neighbors[atom] if n in self.pos)
            bond = self.bonds[(min(atom, parent), max(atom, parent))]
            linear = (
                bond.order is BondOrder.TRIPLE
                or self.mol.atoms[atom].hybridization is Hybridization.SP
            )
            if linear:
                return [back + math.pi]
            return [back + math.pi + self.zigzag.get(atom, 1) * ZIGZAG_TURN]
        return [back + 2 * math.pi * (i + 1) / (count + 1) for i in range(count)]

    def build(self) -> np.ndarray:
        queue: deque[int] = deque()
        for root in self.heavy:
            if root in self.pos:
                continue
            if self.pos:
                # another component; park it to the right
                right = max(p[0] for p in self.pos.values())
                self.pos[root] = np.array([right + 2 * BOND_LENGTH, 0.0])
            else:
                self.pos[root] = np.zeros(2)
            self.zigzag[root] = 1
            if root in self.system_of:
                self.place_ring_system(self.system_of[root], root, 0.0)
                system = self.system_of[root]
                queue.extend(sorted(a for r in self.systems[system] for a in r))
            else:
                queue.append(root)
            while queue:
                atom = queue.popleft()
                children = [n for n in self.neighbors[atom] if n not in self.pos]
                if not children:
                    continue
                angles = self._child_angles(atom, len(children))
                for child, theta in zip(children, angles, strict=True):
                    if child in self.pos:
                        continue
                    self.pos[child] = self.pos[atom] + BOND_LENGTH * _unit(theta)
                    self.zigzag[child] = -self.zigzag.get(atom, 1)
                    if child in self.system_of:
                        system = self.system_of[child]
                        self.place_ring_system(system, child, theta)
                        queue.extend(
                            sorted(a for r in self.systems[system] for a in r)
                        )
                    else:
                        queue.append(child)
        return np.array([self.pos[i] for i in self.heavy], dtype=np.float64)


def relax(
    coords: np.ndarray,
    edges: np.ndarray,
    iterations: int = RELAX_ITERATIONS,
    step: float = RELAX_STEP,
) -> np.ndarray:
    """
    Spring/repulsion relaxation.

    Bonds pull toward BOND_LENGTH with unit strength; non-bonded pairs closer
    than REPULSION_CUTOFF push apart with magnitude ``1/d**2 - 1``. Each
    atom moves at most MAX_DISPLACEMENT per iteration.
    """
    x = coords.copy()
    n = len(x)
    if n < 2:
        return x
    bonded = np.zeros((n, n), dtype=bool)
    if len(edges):
        bonded[edges[:, 0], edges[:, 1]] = True
        bonded[edges[:, 1], edges[:, 0]] = True
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    free_i, free_j = np.nonzero(upper & ~bonded)
    # fixed direction for coincident atoms
    jitter = np.stack(
        [np.cos(np.arange(len(free_i))), np.sin(np.arange(len(free_i)))], axis=1
    )

    for _ in range(iterations):
        force = np.zeros_like(x)
        if len(edges):
            vec = x[edges[:, 1]] - x[edges[:, 0]]
            dist = np.linalg.norm(vec, axis=1)
            unit = vec / np.maximum(dist, 1e-9)[:, None]
            pull = (dist - BOND_LENGTH)[:, None] * unit
            np.add.at(force, edges[:, 0], pull)
            np.add.at(force, edges[:, 1], -pull)
        if len(free_i):
            vec = x[free_j] - x[free_i]
            dist = np.linalg.norm(vec, axis=1)
            close = dist < REPULSION_CUTOFF
            if np.any(close):
                safe = vec / np.maximum(dist, 1e-9)[:, None]
                unit = np.where((dist > 1e-9)[:, None], safe, jitter)
                magnitude = np.where(
                    close, 1.0 / np.maximum(dist, 1e-3) ** 2 - 1.0, 0.0
                )
                push = magnitude[:, None] * unit
                np.add.at(force, free_i, -push)
                np.add.at(force, free_j, push)
        move = step * force
        norms = np.linalg.norm(move, axis=1)
        scale = np.minimum(1.0, MAX_DISPLACEMENT / np.maximum(norms, 1e-12))
        x += move * scale[:, None]
    return x


def check_extent(layout: Layout2D, image_size: int, resolution: float) -> None:
    """Raise LayoutOverflow unless the layout fits with a one-pixel margin."""
    limit = image_size * resolution - 2
    width, height = layout.extent()
    if width > limit or height > limit:
        raise LayoutOverflow(
            f"layout spans {width:.2f} x {height:.2f} units; limit is {limit:.2f}"
        )


def layout_2d(
    mol: MolGraph,
    image_size: int | None = None,
    resolution: float | None = None,
) -> Layout2D:
    """
    Deterministic 2D layout of the heavy atoms of a perceived, connected graph.

    Args:
        mol: perceived molecular graph.
        image_size: pixel extent the layout must fit (defaults from ConfigVars).
        resolution: distance units per pixel (defaults from ConfigVars).

    Returns:
        Layout2D: coordinates centered on their bounding box.

    Raises:
        LayoutOverflow: the relaxed layout does not fit the image extent.
    """
    config = ConfigVars()
    size = image_size if image_size is not None else config.IMAGE_SIZE
    res = resolution if resolution is not None else config.IMAGE_RESOLUTION

    builder = _Builder(mol)
    coords = builder.build()
    position = {atom: k for k, atom in enumerate(builder.heavy)}
    edges = np.array(
        [
            (position[bond.a], position[bond.b])
            for bond in mol.bonds
            if bond.a in position and bond.b in position
        ],
        dtype=np.int64,
    ).reshape(-1, 2)
    coords = relax(coords, edges)
    center = (coords.max(axis=0) + coords.min(axis=0)) / 2
    layout = Layout2D(coords=coords - center, atoms=tuple(builder.heavy))
    check_extent(layout, size, res)
    return layout


def rotate_layout(layout: Layout2D, theta: float) -> Layout2D:
    """Rigid rotation by ``theta`` radians about the coordinate mean."""
    cos, sin = math.cos(theta), math.sin(theta)
    rotation = np.array([[cos, -sin], [sin, cos]])
    mean = layout.coords.mean(axis=0)
    coords = (layout.coords - mean) @ rotation.T + mean
    return Layout2D(coords=coords, atoms=layout.atoms)
