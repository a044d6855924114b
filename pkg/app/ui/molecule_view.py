"""Compute what the explorer displays, without touching Streamlit."""

import numpy as np
import pandas as pd
from chem.gasteiger import gasteiger_charges
from data_types.explorer import ExplorerSettings, MoleculeView
from data_types.molecule import MolGraph
from encoding.text import build_vocab, encode
from harness.dataset import prepare_molecule
from imaging.layout import layout_2d
from imaging.raster import ImageScheme, augmented_sample
from labels.descriptors import compute_descriptors

ENGD_CHANNELS = ("atomic number", "partial charge", "valence", "hybridization")


def charge_table(mol: MolGraph) -> pd.DataFrame:
    charges = gasteiger_charges(mol)
    return pd.DataFrame(
        {
            "atom": range(len(mol.atoms)),
            "element": [atom.element for atom in mol.atoms],
            "hydrogens": [atom.explicit_h + atom.implicit_h for atom in mol.atoms],
            "hybridization": [atom.hybridization.value for atom in mol.atoms],
            "charge": charges,
        }
    )


def build_view(
    smiles: str, settings: ExplorerSettings, corpus: list[str] | None = None
) -> MoleculeView:
    """
    Parse, label, draw and encode one SMILES string.

    The one-hot vocabulary covers ``corpus`` (canonical strings) plus the
    molecule itself.

    Raises:
        ChemNetError: any parse, descriptor, layout or encoding failure.
    """
    mol, canonical = prepare_molecule(smiles)
    vector = compute_descriptors(mol, settings["descriptor_count"])
    descriptors = pd.DataFrame(
        {"descriptor": list(vector.names), "value": vector.values}
    )

    size, resolution = settings["image_size"], settings["resolution"]
    layout = layout_2d(mol, size, resolution)
    rng = None
    if settings["rotation_seed"] is not None:
        rng = np.random.default_rng(settings["rotation_seed"])
    std = augmented_sample(mol, ImageScheme.STD, rng, size, resolution, layout)
    if rng is not None:
        rng = np.random.default_rng(settings["rotation_seed"])
    engd = augmented_sample(mol, ImageScheme.ENGD, rng, size, resolution, layout)

    vocab = build_vocab([*(corpus or []), canonical])
    one_hot = encode(canonical, vocab, settings["sequence_length"])
    return {
        "canonical": canonical,
        "descriptors": descriptors,
        "charges": charge_table(mol),
        "std_image": std.pixels,
        "engd_image": engd.pixels,
        "one_hot": one_hot,
        "vocabulary": list(vocab.symbols),
    }
