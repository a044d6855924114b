"""Test carve-out plus K-fold cross-validation plans, and minority oversampling."""

from __future__ import annotations

import numpy as np
from errors import OneClassOnly, TooSmall
from harness.dataset import Dataset, TaskKind
from log_tools import Logger
from pydantic import BaseModel, ConfigDict
from sklearn.model_selection import KFold, StratifiedKFold, train_test_split

app_logger = Logger.get_app_logger()


class Fold(BaseModel):
    model_config = ConfigDict(frozen=True)

    train: list[int]
    validation: list[int]


class SplitPlan(BaseModel):
    """Held-out test indices and K (train, validation) folds over the rest."""

    test: list[int]
    folds: list[Fold]
    seed: int
    stratified: bool

    @property
    def k(self) -> int:
        return len(self.folds)

    def remainder(self) -> list[int]:
        return sorted(i for fold in self.folds for i in fold.validation)

    def check(self, n_records: int) -> None:
        """Raise ValueError when the plan is not a clean partition of the records."""
        test = set(self.test)
        remainder = set(range(n_records)) - test
        seen: list[int] = []
        for fold in self.folds:
            train, validation = set(fold.train), set(fold.validation)
            if train & validation or (train | validation) & test:
                raise ValueError("fold overlaps the test set or itself")
            if train | validation != remainder:
                raise ValueError("fold does not cover the remainder")
            seen.extend(fold.validation)
        if sorted(seen) != sorted(remainder):
            raise ValueError("validation sets do not partition the remainder")


def strata_for(dataset: Dataset) -> np.ndarray | None:
    """
    Stratification key per record.

    Single-task classification uses the class (missing as its own stratum),
    multi-task classification the any-positive flag, regression nothing.
    """
    if dataset.task is TaskKind.REGRESSION:
        return None
    labels = dataset.labels
    if dataset.n_tasks == 1:
        return np.where(np.isnan(labels[:, 0]), -1, labels[:, 0]).astype(np.int64)
    return (np.nan_to_num(labels, nan=0.0) > 0.5).any(axis=1).astype(np.int64)


def _usable(strata: np.ndarray | None, groups: int) -> bool:
    if strata is None:
        return False
    _, counts = np.unique(strata, return_counts=True)
    return len(counts) > 1 and int(counts.min()) >= groups


def make_split(
    dataset: Dataset | int,
    test_fraction: float = 1 / 6,
    k: int = 5,
    seed: int = 0,
    stratify: bool = True,
    strata: np.ndarray | None = None,
) -> SplitPlan:
    """
    Carve out a test set, then split the remainder into K folds.

    ``dataset`` may be a record count, in which case ``strata`` (if any) is
    used as given. Strata with too few members for a stratified split fall
    back to a plain shuffled split.

    Raises:
        TooSmall: fewer than ``2 * k`` records.
    """
    if isinstance(dataset, Dataset):
        n = len(dataset)
        if strata is None and stratify:
            strata = strata_for(dataset)
    else:
        n = dataset
    if n < 2 * k:
        err_msg = f"{n} records cannot be split into {k} folds plus a test set"
        app_logger.error(err_msg)
        raise TooSmall(err_msg)

    indices = np.arange(n)
    n_test = max(1, round(n * test_fraction))
    use_strata = stratify and _usable(strata, 2)
    rest, test = train_test_split(
        indices,
        test_size=n_test,
        random_state=seed,
        shuffle=True,
        stratify=strata if use_strata else None,
    )
    rest = np.sort(rest)
    if len(rest) < k:
        raise TooSmall(f"{len(rest)} records left for {k} folds")

    rest_strata = strata[rest] if strata is not None else None
    fold_stratified = stratify and _usable(rest_strata, k)
    if stratify and not fold_stratified:
        app_logger.info("Folds are not stratified: a stratum has fewer than k members")
    splitter = (
        StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
        if fold_stratified
        else KFold(n_splits=k, shuffle=True, random_state=seed)
    )
    folds = [
        Fold(
            train=sorted(rest[train].tolist()),
            validation=sorted(rest[validation].tolist()),
        )
        for train, validation in splitter.split(rest, rest_strata)
    ]
    return SplitPlan(
        test=sorted(test.tolist()),
        folds=folds,
        seed=seed,
        stratified=bool(use_strata and fold_stratified),
    )


def oversample_minority(train: list[int] | np.ndarray, labels: np.ndarray) -> list[int]:
    """
    Append the minority-class indices ``floor(majority / minority) - 1`` more
    times to a training index list.

    ``labels`` is indexed by record (a 1-D binary vector, NaN for missing);
    records with a missing label are kept but never counted or repeated.

    Raises:
        OneClassOnly: the training labels hold a single class.
    """
    picked = [int(i) for i in train]
    values = np.asarray(labels, dtype=np.float64)[picked]
    positives = [i for i, v in zip(picked, values, strict=True) if v == 1.0]
    negatives = [i for i, v in zip(picked, values, strict=True) if v == 0.0]
    if not positives or not negatives:
        raise OneClassOnly("training labels contain one class only")
    minority, majority = sorted((positives, negatives), key=len)
    extra = len(majority) // len(minority) - 1
    return picked + minority * extra
