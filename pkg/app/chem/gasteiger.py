"""Gasteiger-Marsili partial charges (iterative electronegativity equalization)."""

from __future__ import annotations

import copy
from functools import cache
from pathlib import Path
from types import MappingProxyType
from typing import NamedTuple

import numpy as np
import pandas as pd
from config import ConfigVars
from data_types.molecule import MolGraph
from errors import MissingParameter
from log_tools import Logger

app_logger = Logger.get_app_logger()

ITERATIONS = 8
DAMPING = 0.5
HYDROGEN_CATION_CHI = 20.02


class GasteigerParams(NamedTuple):
    a: float
    b: float
    c: float


@cache
def gasteiger_table() -> MappingProxyType[tuple[str, str], GasteigerParams]:
    """Bundled (element, hybridization) -> (a, b, c) table."""
    csv_path = Path(ConfigVars().RESOURCES_DIR) / "gasteiger_params.csv"
    frame = pd.read_csv(csv_path)
    table = {
        (row.element, row.hybridization): GasteigerParams(
            float(row.a), float(row.b), float(row.c)
        )
        for row in frame.itertuples(index=False)
    }
    return MappingProxyType(table)


def parameters_for(element: str, hybridization: str) -> GasteigerParams:
    """Exact (element, hybridization) entry, else the element's first entry."""
    table = gasteiger_table()
    params = table.get((element, hybridization))
    if params is not None:
        return params
    for (symbol, _), fallback in table.items():
        if symbol == element:
            return fallback
    raise MissingParameter(f"no Gasteiger parameters for element {element}")


def gasteiger_charges(
    mol: MolGraph, iterations: int = ITERATIONS, damping: float = DAMPING
) -> np.ndarray:
    """
    Partial charge per atom of a perceived graph.

    Hydrogens counted on an atom take part as pseudo-atoms and their charges
    are added to the atom at the end, so the result sums to the total formal
    charge.

    Args:
        mol: perceived molecular graph.
        iterations: number of equalization rounds.
        damping: charge transfer in round k is scaled by ``damping ** k``.

    Returns:
        np.ndarray: float64 charges, one per atom of ``mol``.

    Raises:
        MissingParameter: an element has no entry in the parameter table.
    """
    n_atoms = mol.n_atoms
    h_owner: list[int] = [
        index for index, atom in enumerate(mol.atoms) for _ in range(atom.total_h)
    ]
    n_total = n_atoms + len(h_owner)

    params = [
        parameters_for(atom.element, atom.hybridization.value) for atom in mol.atoms
    ]
    if h_owner:
        params.extend([parameters_for("H", "SP3")] * len(h_owner))
    coeffs = np.array(params, dtype=np.float64).reshape(n_total, 3)
    a, b, c = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2]
    chi_plus = a + b + c
    is_hydrogen = np.array(
        [atom.atomic_number == 1 for atom in mol.atoms] + [True] * len(h_owner)
    )
    chi_plus[is_hydrogen] = HYDROGEN_CATION_CHI

    left = np.array([bond.a for bond in mol.bonds] + h_owner, dtype=np.int64)
    right = np.array(
        [bond.b for bond in mol.bonds] + list(range(n_atoms, n_total)),
        dtype=np.int64,
    )

    charges = np.zeros(n_total, dtype=np.float64)
    charges[:n_atoms] = [atom.formal_charge for atom in mol.atoms]

    for k in range(1, iterations + 1):
        chi = a + b * charges + c * charges**2
        diff = chi[right] - chi[left]
        # scale by the cation electronegativity of the less electronegative end
        denom = np.where(diff > 0, chi_plus[left], chi_plus[right])
        delta = diff / denom * damping**k
        charges += np.bincount(left, weights=delta, minlength=n_total)
        charges -= np.bincount(right, weights=delta, minlength=n_total)

    result = charges[:n_atoms].copy()
    if h_owner:
        result += np.bincount(
            np.array(h_owner), weights=charges[n_atoms:], minlength=n_atoms
        )
    return result


def with_partial_charges(mol: MolGraph, zero_on_missing: bool = False) -> MolGraph:
    """
    Copy of ``mol`` with ``partial_charge`` filled in on every atom.

    With ``zero_on_missing`` an element lacking parameters yields all-zero
    charges and a warning instead of MissingParameter.
    """
    result = copy.deepcopy(mol)
    try:
        charges = gasteiger_charges(mol)
    except MissingParameter as err:
        if not zero_on_missing:
            raise
        app_logger.warning("%s; using zero charges for %s", err, mol.source_smiles)
        charges = np.zeros(mol.n_atoms)
    for atom, charge in zip(result.atoms, charges, strict=True):
        atom.partial_charge = float(charge)
    return result
