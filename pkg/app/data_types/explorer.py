"""Data types for the molecule explorer."""

from typing import TypedDict

import numpy as np
import pandas as pd


class ExplorerSettings(TypedDict):
    """Settings chosen in the explorer sidebar."""

    image_size: int
    resolution: float
    rotation_seed: int | None
    sequence_length: int
    descriptor_count: int


class MoleculeView(TypedDict):
    """Everything the explorer shows for one SMILES string."""

    canonical: str
    descriptors: pd.DataFrame
    charges: pd.DataFrame
    std_image: np.ndarray
    engd_image: np.ndarray
    one_hot: np.ndarray
    vocabulary: list[str]
