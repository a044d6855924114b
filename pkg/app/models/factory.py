"""Build models from architecture specs, presets or saved metadata."""

from __future__ import annotations

from typing import Any

from config import (
    ArchitectureSpec,
    ChemceptionSpec,
    ExperimentConfig,
    HeadKind,
    Smiles2VecSpec,
)
from errors import SpecError
from imaging.raster import ImageScheme
from models.chemception import build_chemception
from models.smiles2vec import build_smiles2vec
from tensornet.model import Model


def build_model(spec: ArchitectureSpec, seed: int = 0, dtype: str = "float32") -> Model:
    if isinstance(spec, ChemceptionSpec):
        return build_chemception(spec, seed=seed, dtype=dtype)
    return build_smiles2vec(spec, seed=seed, dtype=dtype)


def spec_for_experiment(
    config: ExperimentConfig,
    n_outputs: int,
    head: HeadKind,
    vocab_size: int | None = None,
) -> ArchitectureSpec:
    """Architecture spec matching an experiment's modality and sizes."""
    if config.modality == "text":
        if vocab_size is None:
            raise SpecError("text models need a vocabulary size")
        return Smiles2VecSpec(
            vocab_size=vocab_size,
            length=config.sequence_length,
            hidden=config.hidden,
            n_outputs=n_outputs,
            head=head,
        )
    return ChemceptionSpec(
        T=config.T,
        F=config.F,
        height=config.image_size,
        width=config.image_size,
        channels=ImageScheme.from_modality(config.modality).channels,
        n_outputs=n_outputs,
        head=head,
    )


def spec_from_metadata(metadata: dict[str, Any]) -> ArchitectureSpec:
    """Recover the architecture spec stored in a model's metadata."""
    architecture = metadata.get("architecture")
    if not isinstance(architecture, dict):
        raise SpecError("model metadata carries no architecture")
    if architecture.get("kind") == "smiles2vec":
        return Smiles2VecSpec(**architecture)
    return ChemceptionSpec(**architecture)
