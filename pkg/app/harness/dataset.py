"""Labelled molecule datasets with reject logs and a duplicate audit."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from chem.canon import write_canonical_smiles
from chem.graph import largest_fragment
from chem.perception import perceive
from chem.smiles import parse_smiles
from data_types.molecule import MolGraph
from errors import ChemNetError, EmptyDataset, InvalidLabel, SchemaError
from log_tools import Logger
from pydantic import BaseModel, Field

app_logger = Logger.get_app_logger()

Validator = Callable[[MolGraph, str], None]


class TaskKind(str, Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class DatasetSchema(BaseModel):
    """Which columns of a delimited file hold the SMILES, labels and ids."""

    smiles_column: str = "smiles"
    label_columns: list[str] = Field(default_factory=list)
    id_column: str | None = None
    task: TaskKind = TaskKind.CLASSIFICATION
    delimiter: str | None = None  # by file suffix when unset

    def separator(self, path: Path) -> str:
        if self.delimiter is not None:
            return self.delimiter
        return "\t" if path.suffix.lower() in {".tsv", ".tab"} else ","


@dataclass(frozen=True, slots=True)
class Reject:
    row: int
    record_id: str
    smiles: str
    reason: str
    detail: str = ""


@dataclass(slots=True)
class Dataset:
    """
    Parsed records in file order.

    ``labels`` is N x n_tasks with NaN for missing cells; ``mols`` holds the
    perceived largest fragment of each record.
    """

    ids: list[str]
    smiles: list[str]
    canonical: list[str]
    mols: list[MolGraph]
    labels: np.ndarray
    task: TaskKind
    label_names: list[str]
    rejects: list[Reject] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_tasks(self) -> int:
        return len(self.label_names)

    @property
    def mask(self) -> np.ndarray:
        return ~np.isnan(self.labels)

    def reject_counts(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for reject in self.rejects:
            counts[reject.reason] += 1
        return dict(sorted(counts.items()))

    def duplicates(self) -> dict[str, list[str]]:
        """Canonical SMILES that occur more than once, with their record ids."""
        groups: dict[str, list[str]] = defaultdict(list)
        for record_id, canonical in zip(self.ids, self.canonical, strict=True):
            groups[canonical].append(record_id)
        return {key: ids for key, ids in groups.items() if len(ids) > 1}

    def subset(self, indices: Sequence[int]) -> Dataset:
        picked = list(indices)
        return Dataset(
            ids=[self.ids[i] for i in picked],
            smiles=[self.smiles[i] for i in picked],
            canonical=[self.canonical[i] for i in picked],
            mols=[self.mols[i] for i in picked],
            labels=self.labels[picked],
            task=self.task,
            label_names=list(self.label_names),
        )


def prepare_molecule(smiles: str) -> tuple[MolGraph, str]:
    """Perceived largest fragment of a SMILES string and its canonical form."""
    mol = largest_fragment(perceive(parse_smiles(smiles)))
    return mol, write_canonical_smiles(mol)


def _parse_label(cell: str, task: TaskKind) -> float:
    text = cell.strip()
    if not text:
        return float("nan")
    try:
        value = float(text)
    except ValueError as err:
        raise InvalidLabel(f"label {text!r} is not a number") from err
    if not np.isfinite(value):
        raise InvalidLabel(f"label {text!r} is not finite")
    if task is TaskKind.CLASSIFICATION and value not in (0.0, 1.0):
        raise InvalidLabel(f"classification label {text!r} is not 0 or 1")
    return value


def build_dataset(
    smiles: Sequence[str],
    labels: np.ndarray | Sequence[Sequence[float]],
    task: TaskKind,
    label_names: Sequence[str],
    ids: Sequence[str] | None = None,
    validate: Validator | None = None,
) -> Dataset:
    """
    Parse in-memory records, diverting failures to the reject log.

    Labels are taken as given (NaN marks a missing value).
    """
    values = np.asarray(labels, dtype=np.float64).reshape(
        len(smiles), len(label_names)
    )
    record_ids = list(ids) if ids is not None else [str(i) for i in range(len(smiles))]
    dataset = Dataset(
        ids=[],
        smiles=[],
        canonical=[],
        mols=[],
        labels=values[:0],
        task=task,
        label_names=list(label_names),
    )
    kept: list[int] = []
    for row, (record_id, text) in enumerate(zip(record_ids, smiles, strict=True)):
        try:
            mol, canonical = prepare_molecule(text)
            if validate is not None:
                validate(mol, canonical)
        except ChemNetError as err:
            dataset.rejects.append(Reject(row, record_id, text, err.reason, str(err)))
            continue
        kept.append(row)
        dataset.ids.append(record_id)
        dataset.smiles.append(text)
        dataset.canonical.append(canonical)
        dataset.mols.append(mol)
    dataset.labels = values[kept]
    if dataset.rejects:
        app_logger.warning(
            "Rejected %d of %d molecules: %s",
            len(dataset.rejects),
            len(smiles),
            dataset_reject_summary(dataset),
        )
    if not kept:
        raise EmptyDataset("no usable records")
    return dataset


def dataset_reject_summary(dataset: Dataset) -> str:
    return ", ".join(f"{k}={v}" for k, v in dataset.reject_counts().items())


@Logger.log
def load_dataset(
    path: str | Path, schema: DatasetSchema, validate: Validator | None = None
) -> Dataset:
    """
    Read a delimited file with a header row.

    Empty label cells are missing values; unparseable SMILES, bad labels and
    molecules refused by ``validate`` (e.g. ones that do not fit the image)
    go to the reject log with their error reason.

    Raises:
        SchemaError: a requested column is not in the header.
        EmptyDataset: no record survives parsing.
    """
    source = Path(path)
    frame = pd.read_csv(
        source,
        sep=schema.separator(source),
        dtype=str,
        keep_default_na=False,
    )
    wanted = [schema.smiles_column, *schema.label_columns]
    if schema.id_column is not None:
        wanted.append(schema.id_column)
    missing = [column for column in wanted if column not in frame.columns]
    if missing:
        err_msg = f"columns {missing} not in header of {source}"
        app_logger.error(err_msg)
        raise SchemaError(err_msg)
    if frame.empty:
        raise EmptyDataset(f"{source} has no rows")

    ids = (
        frame[schema.id_column].tolist()
        if schema.id_column is not None
        else [str(i) for i in range(len(frame))]
    )
    smiles = frame[schema.smiles_column].str.strip().tolist()
    label_rows: dict[int, list[float]] = {}
    label_rejects: list[Reject] = []
    for row, cells in enumerate(frame[schema.label_columns].to_numpy()):
        try:
            label_rows[row] = [_parse_label(cell, schema.task) for cell in cells]
        except InvalidLabel as err:
            label_rejects.append(
                Reject(row, ids[row], smiles[row], err.reason, str(err))
            )
    good = sorted(label_rows)
    if not good:
        raise EmptyDataset(f"{source} has no rows with valid labels")

    dataset = build_dataset(
        [smiles[i] for i in good],
        np.array([label_rows[i] for i in good], dtype=np.float64).reshape(
            len(good), len(schema.label_columns)
        ),
        schema.task,
        schema.label_columns,
        ids=[ids[i] for i in good],
        validate=validate,
    )
    # report rows against the file, not the filtered list
    dataset.rejects = sorted(
        [
            Reject(good[r.row], r.record_id, r.smiles, r.reason, r.detail)
            for r in dataset.rejects
        ]
        + label_rejects,
        key=lambda r: r.row,
    )
    duplicates = dataset.duplicates()
    if duplicates:
        app_logger.warning(
            "%d canonical SMILES occur more than once in %s",
            len(duplicates),
            source,
        )
    return dataset


def write_rejects(path: str | Path, rejects: Sequence[Reject]) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(
        [(r.row, r.record_id, r.smiles, r.reason, r.detail) for r in rejects],
        columns=["row", "id", "smiles", "reason", "detail"],
    ).to_csv(out, index=False)
    return out


def write_duplicate_audit(path: str | Path, dataset: Dataset) -> Path:
    """One row per duplicated record: canonical SMILES, id, group size."""
    rows = [
        (canonical, record_id, len(ids))
        for canonical, ids in dataset.duplicates().items()
        for record_id in ids
    ]
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=["canonical_smiles", "id", "copies"]).to_csv(
        out, index=False
    )
    return out
