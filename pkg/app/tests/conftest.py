"""Shared fixtures."""

from collections.abc import Callable

import numpy as np
import pytest
from data_types.molecule import MolGraph
from tests.helpers import perceived


@pytest.fixture
def mol_from() -> Callable[[str], MolGraph]:
    return perceived


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
