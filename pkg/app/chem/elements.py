"""Periodic table subset (H-Kr plus I) with masses and default valences."""

from __future__ import annotations

from functools import cache
from pathlib import Path
from types import MappingProxyType
from typing import NamedTuple

import pandas as pd
from config import ConfigVars

ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
AROMATIC_ORGANIC = frozenset({"b", "c", "n", "o", "p", "s"})
AROMATIC_BRACKET = AROMATIC_ORGANIC | {"se", "as"}
HETEROATOM_EXCLUDED = frozenset({"C", "H"})


class ElementInfo(NamedTuple):
    symbol: str
    atomic_number: int
    mass: float
    valences: tuple[int, ...]
    main_group: bool


@cache
def element_table() -> MappingProxyType[str, ElementInfo]:
    """Load the bundled element table, keyed by symbol."""
    csv_path = Path(ConfigVars().RESOURCES_DIR) / "elements.csv"
    frame = pd.read_csv(csv_path, dtype={"valences": str}, keep_default_na=False)
    table: dict[str, ElementInfo] = {}
    for row in frame.itertuples(index=False):
        valences = tuple(int(v) for v in str(row.valences).split(";") if v)
        table[row.symbol] = ElementInfo(
            symbol=row.symbol,
            atomic_number=int(row.atomic_number),
            mass=float(row.mass),
            valences=valences,
            main_group=bool(row.main_group),
        )
    return MappingProxyType(table)


@cache
def _by_number() -> dict[int, ElementInfo]:
    return {info.atomic_number: info for info in element_table().values()}


def lookup(symbol: str) -> ElementInfo | None:
    return element_table().get(symbol)


def by_atomic_number(number: int) -> ElementInfo | None:
    return _by_number().get(number)


def allowed_valences(symbol: str, formal_charge: int = 0) -> tuple[int, ...]:
    """
    Valences allowed for an element carrying a formal charge.

    A charged atom takes the valences of its isoelectronic neighbor in the
    table (N+ behaves like C, O- like F); if that neighbor has no valence entry
    the element's own list is used.
    """
    info = lookup(symbol)
    if info is None or not info.valences:
        return ()
    if formal_charge == 0:
        return info.valences
    shifted = by_atomic_number(info.atomic_number - formal_charge)
    if shifted is not None and shifted.valences:
        return shifted.valences
    return info.valences


def max_valence(symbol: str, formal_charge: int = 0) -> int | None:
    valences = allowed_valences(symbol, formal_charge)
    return max(valences) if valences else None
