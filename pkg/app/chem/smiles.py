"""
SMILES reader and writer.

The reader covers the OpenSMILES subset used by drug-like corpora: organic
subset and bracket atoms, ring closures (including ``%nn``), branches, the bond
symbols ``- = # :``, aromatic lowercase atoms, charges and hydrogen counts, and
dot-separated fragments. Stereo marks (``/ \\ @ @@``), isotopes and atom classes
are accepted and discarded.
"""

from __future__ import annotations

from collections.abc import Sequence

from chem.elements import (
    AROMATIC_BRACKET,
    AROMATIC_ORGANIC,
    ORGANIC_SUBSET,
    lookup,
    max_valence,
)
from chem.perception import implicit_hydrogens
from data_types.molecule import Atom, BondOrder, MolGraph
from errors import SmilesSyntaxError, ValenceError

BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
}
STEREO_BOND_SYMBOLS = {"/", "\\"}


class _SmilesReader:
    """Single-pass state machine over a SMILES string."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.mol = MolGraph(source_smiles=text)
        self.prev_atom: int | None = None
        self.pending_bond: BondOrder | None = None
        self.pending_symbol: str | None = None
        self.branches: list[int] = []
        self.open_rings: dict[int, tuple[int, BondOrder | None]] = {}

    def error(self, message: str) -> SmilesSyntaxError:
        return SmilesSyntaxError(
            f"{message} at position {self.pos} in {self.text!r}"
        )

    def read(self) -> MolGraph:
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char == "(":
                if self.prev_atom is None or self.pending_symbol is not None:
                    raise self.error("branch without a preceding atom")
                self.branches.append(self.prev_atom)
                self.pos += 1
            elif char == ")":
                if not self.branches:
                    raise self.error("unbalanced ')'")
                if self.pending_symbol is not None:
                    raise self.error("bond symbol before ')'")
                self.prev_atom = self.branches.pop()
                self.pos += 1
            elif char in BOND_SYMBOLS or char in STEREO_BOND_SYMBOLS:
                self.read_bond_symbol(char)
            elif char == ".":
                if self.pending_symbol is not None:
                    raise self.error("bond symbol before '.'")
                if self.branches:
                    raise self.error("'.' inside a branch")
                self.prev_atom = None
                self.pos += 1
            elif char.isdigit() or char == "%":
                self.read_ring_closure()
            elif char == "[":
                self.read_bracket_atom()
            else:
                self.read_organic_atom()

        if self.open_rings:
            raise self.error(f"unmatched ring closure {sorted(self.open_rings)}")
        if self.branches:
            raise self.error("unbalanced '('")
        if self.pending_symbol is not None:
            raise self.error("dangling bond symbol")
        if not self.mol.atoms:
            raise self.error("no atoms")
        return self.mol

    def read_bond_symbol(self, char: str) -> None:
        if self.prev_atom is None:
            raise self.error(f"bond symbol {char!r} without a preceding atom")
        if self.pending_symbol is not None:
            raise self.error("two consecutive bond symbols")
        # directional bonds are plain single bonds once stereo is dropped
        self.pending_bond = BOND_SYMBOLS.get(char, BondOrder.SINGLE)
        self.pending_symbol = char
        self.pos += 1

    def take_pending_bond(self) -> BondOrder | None:
        order = self.pending_bond
        self.pending_bond = None
        self.pending_symbol = None
        return order

    def read_ring_closure(self) -> None:
        if self.prev_atom is None:
            raise self.error("ring closure without a preceding atom")
        if self.text[self.pos] == "%":
            digits = self.text[self.pos + 1 : self.pos + 3]
            if len(digits) != 2 or not digits.isdigit():
                raise self.error("'%' must be followed by two digits")
            number = int(digits)
            self.pos += 3
        else:
            number = int(self.text[self.pos])
            self.pos += 1

        order = self.take_pending_bond()
        if number not in self.open_rings:
            self.open_rings[number] = (self.prev_atom, order)
            return

        partner, open_order = self.open_rings.pop(number)
        if order is not None and open_order is not None and order != open_order:
            raise self.error(f"conflicting bond orders on ring closure {number}")
        if partner == self.prev_atom:
            raise self.error(f"ring closure {number} bonds an atom to itself")
        if self.mol.bond_between(partner, self.prev_atom) is not None:
            raise self.error(f"ring closure {number} duplicates an existing bond")
        self.add_bond(partner, self.prev_atom, order or open_order)

    def add_bond(self, a: int, b: int, order: BondOrder | None) -> None:
        atom_a, atom_b = self.mol.atoms[a], self.mol.atoms[b]
        both_aromatic = atom_a.aromatic and atom_b.aromatic
        if order is None:
            order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
        elif order is BondOrder.AROMATIC and not both_aromatic:
            raise self.error("aromatic bond between non-aromatic atoms")
        self.mol.add_bond(a, b, order)

    def attach(self, atom: Atom) -> None:
        index = self.mol.add_atom(atom)
        if self.prev_atom is not None:
            self.add_bond(self.prev_atom, index, self.take_pending_bond())
        elif self.pending_symbol is not None:
            raise self.error("bond symbol without a preceding atom")
        self.prev_atom = index

    def read_organic_atom(self) -> None:
        two = self.text[self.pos : self.pos + 2]
        if two in ("Cl", "Br"):
            symbol, aromatic = two, False
        else:
            char = self.text[self.pos]
            if char in ORGANIC_SUBSET:
                symbol, aromatic = char, False
            elif char in AROMATIC_ORGANIC:
                symbol, aromatic = char.upper(), True
            else:
                raise self.error(f"unknown symbol {char!r}")
        info = lookup(symbol)
        assert info is not None
        self.pos += len(symbol)
        self.attach(
            Atom(element=symbol, atomic_number=info.atomic_number, aromatic=aromatic)
        )

    def read_bracket_atom(self) -> None:
        end = self.text.find("]", self.pos)
        if end < 0:
            raise self.error("unterminated bracket atom")
        body = self.text[self.pos + 1 : end]
        self.pos = end + 1
        self.attach(self.parse_bracket(body))

    def parse_bracket(self, body: str) -> Atom:
        i = 0
        while i < len(body) and body[i].isdigit():  # isotope, discarded
            i += 1

        symbol, aromatic = None, False
        if body[i : i + 2] in AROMATIC_BRACKET:
            symbol, aromatic = body[i : i + 2].capitalize(), True
            i += 2
        elif body[i : i + 1] in AROMATIC_BRACKET:
            symbol, aromatic = body[i].upper(), True
            i += 1
        elif body[i : i + 1].isupper():
            if body[i + 1 : i + 2].islower() and lookup(body[i : i + 2]) is not None:
                symbol = body[i : i + 2]
                i += 2
            else:
                symbol = body[i]
                i += 1
        info = lookup(symbol) if symbol else None
        if info is None:
            raise self.error(f"unknown or unsupported element in [{body}]")

        while i < len(body) and body[i] == "@":  # chirality, discarded
            i += 1
            while i < len(body) and (body[i].isupper() and body[i] != "H"):
                i += 1
            while i < len(body) and body[i].isdigit():
                i += 1

        hydrogens = 0
        if i < len(body) and body[i] == "H":
            i += 1
            start = i
            while i < len(body) and body[i].isdigit():
                i += 1
            hydrogens = int(body[start:i]) if i > start else 1

        charge = 0
        if i < len(body) and body[i] in "+-":
            sign = 1 if body[i] == "+" else -1
            i += 1
            start = i
            while i < len(body) and body[i].isdigit():
                i += 1
            if i > start:
                charge = sign * int(body[start:i])
            else:
                charge = sign
                while i < len(body) and body[i] == ("+" if sign > 0 else "-"):
                    charge += sign
                    i += 1

        if i < len(body) and body[i] == ":":  # atom class, discarded
            i += 1
            while i < len(body) and body[i].isdigit():
                i += 1

        if i != len(body):
            raise self.error(f"unexpected characters in [{body}]")

        return Atom(
            element=info.symbol,
            atomic_number=info.atomic_number,
            formal_charge=charge,
            explicit_h=hydrogens,
            aromatic=aromatic,
            bracket=True,
        )


def _fold_explicit_hydrogens(mol: MolGraph) -> MolGraph:
    """Fold neutral [H] atoms bound to a single heavy atom into its H count."""
    folded: set[int] = set()
    for index, atom in enumerate(mol.atoms):
        if atom.atomic_number != 1 or atom.formal_charge != 0 or atom.explicit_h:
            continue
        neighbors = mol.adjacency[index]
        if len(neighbors) != 1 or mol.atoms[neighbors[0]].atomic_number == 1:
            continue
        bond = mol.bond_between(index, neighbors[0])
        if bond is None or bond.order is not BondOrder.SINGLE:
            continue
        mol.atoms[neighbors[0]].explicit_h += 1
        folded.add(index)

    if not folded:
        return mol

    remap: dict[int, int] = {}
    result = MolGraph(source_smiles=mol.source_smiles)
    for index, atom in enumerate(mol.atoms):
        if index not in folded:
            remap[index] = result.add_atom(atom)
    for bond in mol.bonds:
        if bond.a in remap and bond.b in remap:
            result.add_bond(remap[bond.a], remap[bond.b], bond.order)
    return result


def check_valences(mol: MolGraph) -> None:
    """Raise ValenceError when an atom's bond-order sum exceeds its table maximum."""
    orders: list[int] = [0] * mol.n_atoms
    for bond in mol.bonds:
        step = 1 if bond.order is BondOrder.AROMATIC else int(bond.order)
        orders[bond.a] += step
        orders[bond.b] += step
    for index, atom in enumerate(mol.atoms):
        limit = max_valence(atom.element, atom.formal_charge)
        if limit is None:
            continue
        used = orders[index] + atom.explicit_h
        if used > limit:
            raise ValenceError(
                f"atom {index} ({atom.element}, charge {atom.formal_charge}) has"
                f" valence {used} > {limit} in {mol.source_smiles!r}"
            )


def parse_smiles(text: str) -> MolGraph:
    """
    Parse a SMILES string into a molecular graph (not yet perceived).

    Args:
        text: SMILES string, ASCII, non-empty.

    Returns:
        MolGraph: atoms and bonds as written; explicit ``[H]`` atoms attached
        to heavy atoms are folded into hydrogen counts.

    Raises:
        SmilesSyntaxError: malformed input.
        ValenceError: an atom exceeds the largest valence for its element.
    """
    stripped = text.strip() if isinstance(text, str) else ""
    if not stripped:
        raise SmilesSyntaxError("empty SMILES")
    if not stripped.isascii():
        raise SmilesSyntaxError(f"non-ASCII SMILES {text!r}")
    if any(char.isspace() for char in stripped):
        raise SmilesSyntaxError(f"whitespace inside SMILES {text!r}")
    mol = _fold_explicit_hydrogens(_SmilesReader(stripped).read())
    check_valences(mol)
    return mol


# ---------------------------------------------------------------------------
# writer


def _bond_symbol(mol: MolGraph, a: int, b: int, order: BondOrder) -> str:
    if order is BondOrder.DOUBLE:
        return "="
    if order is BondOrder.TRIPLE:
        return "#"
    if order is BondOrder.SINGLE and mol.atoms[a].aromatic and mol.atoms[b].aromatic:
        return "-"
    return ""


def _charge_text(charge: int) -> str:
    if charge == 0:
        return ""
    sign = "+" if charge > 0 else "-"
    return sign if abs(charge) == 1 else f"{sign}{abs(charge)}"


def atom_token(mol: MolGraph, index: int) -> str:
    """SMILES token for one atom of a perceived graph."""

    atom = mol.atoms[index]
    symbol = atom.element.lower() if atom.aromatic else atom.element
    organic = (
        symbol in AROMATIC_ORGANIC if atom.aromatic else symbol in ORGANIC_SUBSET
    )
    if organic and atom.formal_charge == 0:
        orders = [bond.order for bond in mol.incident_bonds(index)]
        try:
            implied = implicit_hydrogens(atom.element, 0, atom.aromatic, orders, 0)
        except ValenceError:
            implied = -1
        if implied == atom.total_h:
            return symbol

    hydrogens = atom.total_h
    h_text = "" if hydrogens == 0 else ("H" if hydrogens == 1 else f"H{hydrogens}")
    return f"[{symbol}{h_text}{_charge_text(atom.formal_charge)}]"


def _ring_label(number: int) -> str:
    return str(number) if number < 10 else f"%{number}"


def write_smiles(mol: MolGraph, priorities: Sequence[int] | None = None) -> str:
    """
    Emit SMILES for a perceived graph by depth-first traversal.

    Each connected component starts from its lowest-priority atom and
    neighbors are visited in ascending priority. Components are joined by '.'
    in order of their starting atom priority.

    Args:
        mol: perceived molecular graph.
        priorities: one value per atom, lower first; defaults to atom index.
    """
    n = mol.n_atoms
    rank = list(priorities) if priorities is not None else list(range(n))
    if len(rank) != n:
        raise ValueError("priorities must have one entry per atom")
    bonds = mol.bond_lookup()

    def bond_of(a: int, b: int) -> BondOrder:
        return bonds[(min(a, b), max(a, b))].order

    visited = [False] * n
    parent: list[int | None] = [None] * n
    children: list[list[int]] = [[] for _ in range(n)]
    ring_edges: set[tuple[int, int]] = set()
    opens: list[list[int]] = [[] for _ in range(n)]  # partners closing later
    closes: list[list[int]] = [[] for _ in range(n)]  # partners opened earlier
    order: list[int] = []

    def visit(root: int) -> None:
        stack: list[tuple[int, int]] = [(root, 0)]
        visited[root] = True
        order.append(root)
        while stack:
            atom, cursor = stack[-1]
            neighbors = sorted(mol.adjacency[atom], key=lambda k: rank[k])
            if cursor >= len(neighbors):
                stack.pop()
                continue
            stack[-1] = (atom, cursor + 1)
            nbr = neighbors[cursor]
            if nbr == parent[atom]:
                continue
            key = (min(atom, nbr), max(atom, nbr))
            if visited[nbr]:
                if key not in ring_edges and parent[nbr] != atom:
                    ring_edges.add(key)
                    opens[nbr].append(atom)
                    closes[atom].append(nbr)
                continue
            visited[nbr] = True
            parent[nbr] = atom
            children[atom].append(nbr)
            order.append(nbr)
            stack.append((nbr, 0))

    roots: list[int] = []
    for atom in sorted(range(n), key=lambda k: rank[k]):
        if not visited[atom]:
            roots.append(atom)
            visit(atom)

    position = {atom: i for i, atom in enumerate(order)}
    ring_numbers: dict[tuple[int, int], int] = {}
    in_use: set[int] = set()

    def emit(root: int) -> str:
        out: list[str] = []
        stack: list[int | str] = [root]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            atom = item
            out.append(atom_token(mol, atom))
            for partner in sorted(closes[atom], key=lambda k: position[k]):
                key = (min(atom, partner), max(atom, partner))
                number = ring_numbers.pop(key)
                in_use.discard(number)
                out.append(_ring_label(number))
            for partner in sorted(opens[atom], key=lambda k: rank[k]):
                key = (min(atom, partner), max(atom, partner))
                number = next(k for k in range(1, 100) if k not in in_use)
                in_use.add(number)
                ring_numbers[key] = number
                symbol = _bond_symbol(mol, atom, partner, bond_of(atom, partner))
                out.append(symbol + _ring_label(number))
            kids = children[atom]
            # push in reverse so the first child is emitted first
            for i in range(len(kids) - 1, -1, -1):
                kid = kids[i]
                symbol = _bond_symbol(mol, atom, kid, bond_of(atom, kid))
                if i < len(kids) - 1:
                    stack.append(")")
                    stack.append(kid)
                    stack.append("(" + symbol)
                else:
                    stack.append(kid)
                    stack.append(symbol)
        return "".join(out)

    return ".".join(emit(root) for root in roots)
