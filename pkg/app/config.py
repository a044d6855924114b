"""Configuration for the ChemNet weak-supervision toolkit."""

from __future__ import annotations

import json
from collections.abc import Callable
from functools import wraps
from pathlib import Path
from typing import Any, Literal, TypeVar

from pydantic import BaseModel, Field, model_validator

R = TypeVar("R")

APP_DIR = Path(__file__).resolve().parent

Modality = Literal["image-std", "image-engd", "text"]
HeadKind = Literal["multitask-linear", "sigmoid", "linear"]
Precision = Literal["float32", "float64"]


class LogColors(BaseModel):
    DEBUG: str = Field(default="cyan")
    INFO: str = Field(default="green")
    WARNING: str = Field(default="yellow")
    ERROR: str = Field(default="red")
    CRITICAL: str = Field(default="bold_red")

    def get(self, key: str, default: str = "") -> str:
        return getattr(self, key, default)


class ConfigVars(BaseModel):
    ATTACH_DEBUGGER: bool = False
    WAIT_FOR_CLIENT: bool = False
    DEFAULT_DEBUG_PORT: int = 8765
    DEBUGPY_HOST: str = "localhost"
    LOG_FILE_PATH: str = "./logs/log.log"
    LOG_LEVEL: str = "INFO"
    LOG_COLORS: LogColors = Field(default_factory=LogColors)
    LOG_NAME: str = "chemnet_log"
    APP_TITLE: str = "ChemNet Molecule Explorer"
    OUTPUT_DIR: str = "./outputs"
    IMAGE_SIZE: int = 80
    IMAGE_RESOLUTION: float = 0.5  # distance units per pixel
    SEQUENCE_LENGTH: int = 250
    MODEL_PRESETS_PATH: str = str(APP_DIR / "model_configs" / "models.json")
    RESOURCES_DIR: str = str(APP_DIR / "resources")
    DEFAULT_SMILES: str = "CC(=O)Oc1ccccc1C(=O)O"
    HELP_TEXT: str = (
        "#### Help\nEnter a SMILES string to inspect how it is seen by the"
        " pre-training pipeline: canonical form, rule-based descriptor labels,"
        " standard and augmented images, and the one-hot text encoding.\n"
        "Change the resolution or image size to check whether a molecule fits"
        " the image extent."
    )


class TrainConfig(BaseModel):
    """Optimizer and stopping settings shared by pre-training and fine-tuning."""

    learning_rate: float = 1e-3
    rho: float = 0.9
    epsilon: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 50
    patience: int = 10
    seed: int = 0
    precision: Precision = "float32"

    @model_validator(mode="after")
    def _check_ranges(self) -> TrainConfig:
        for name in ("learning_rate", "rho", "epsilon", "batch_size", "max_epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if self.patience <= 0 or self.patience > self.max_epochs:
            raise ValueError("patience must be positive and <= max_epochs")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        return self

    @classmethod
    def pretrain_defaults(cls, **overrides: Any) -> TrainConfig:
        return cls(**{"max_epochs": 50, "patience": 10, **overrides})

    @classmethod
    def finetune_defaults(cls, **overrides: Any) -> TrainConfig:
        return cls(**{"max_epochs": 500, "patience": 50, **overrides})


class ChemceptionSpec(BaseModel):
    """Chemception-lite architecture: T inception blocks, F base filters."""

    kind: Literal["chemception"] = "chemception"
    T: int = 3
    F: int = 16
    height: int = 80
    width: int = 80
    channels: int = 1
    n_outputs: int = 1
    head: HeadKind = "multitask-linear"

    @model_validator(mode="after")
    def _check(self) -> ChemceptionSpec:
        if self.T < 1 or self.F < 4:
            raise ValueError("Chemception needs T >= 1 and F >= 4")
        if self.height != self.width:
            raise ValueError("Chemception input must be square")
        if self.n_outputs < 1:
            raise ValueError("n_outputs must be >= 1")
        return self


class Smiles2VecSpec(BaseModel):
    """SMILES2vec-lite architecture: one-hot L x V -> GRU -> GRU -> head."""

    kind: Literal["smiles2vec"] = "smiles2vec"
    vocab_size: int = 2
    length: int = 250
    hidden: int = 64
    n_outputs: int = 1
    head: HeadKind = "multitask-linear"

    @model_validator(mode="after")
    def _check(self) -> Smiles2VecSpec:
        if self.vocab_size < 2 or self.hidden < 1 or self.length < 1:
            raise ValueError("SMILES2vec needs V >= 2, U >= 1, L >= 1")
        if self.n_outputs < 1:
            raise ValueError("n_outputs must be >= 1")
        return self


ArchitectureSpec = ChemceptionSpec | Smiles2VecSpec


class ModelPreset(BaseModel):
    name: str
    modality: Modality
    image_size: int = 80
    resolution: float = 0.5
    T: int = 3
    F: int = 16
    hidden: int = 64
    length: int = 250
    description: str = ""


class ExperimentConfig(BaseModel):
    """Everything a pretrain/finetune/sweep run needs, loadable from JSON."""

    modality: Modality = "image-engd"
    preset: str | None = None
    image_size: int = 80
    resolution: float = 0.5
    T: int = 3
    F: int = 16
    hidden: int = 64
    sequence_length: int = 250
    descriptors: list[str] | None = None
    test_fraction: float = 1 / 6
    folds: int = 5
    stratify: bool = True
    workers: int = 1
    train: TrainConfig = Field(default_factory=TrainConfig)

    @model_validator(mode="after")
    def _check(self) -> ExperimentConfig:
        if not 0 < self.test_fraction < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        return self

    def apply_preset(self, preset: ModelPreset) -> ExperimentConfig:
        """Fill architecture fields from a named preset."""
        return self.model_copy(
            update={
                "modality": preset.modality,
                "image_size": preset.image_size,
                "resolution": preset.resolution,
                "T": preset.T,
                "F": preset.F,
                "hidden": preset.hidden,
                "sequence_length": preset.length,
            }
        )


def load_models_from_json(file_path: str) -> list[ModelPreset]:
    """Load architecture presets from a JSON file."""
    with open(file_path, encoding="utf-8") as json_file:
        models_data = json.load(json_file)
    return [ModelPreset(**model_data) for model_data in models_data]


def load_model_presets(file_path: str | None = None) -> dict[str, ModelPreset]:
    """Presets keyed by name."""
    presets = load_models_from_json(file_path or ConfigVars().MODEL_PRESETS_PATH)
    return {preset.name: preset for preset in presets}


def load_experiment_config(file_path: str | Path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file."""
    with open(file_path, encoding="utf-8") as json_file:
        return ExperimentConfig(**json.load(json_file))


def merge_overrides(
    base: ExperimentConfig, overrides: dict[str, Any]
) -> ExperimentConfig:
    """Apply non-None overrides; TrainConfig fields may be given at top level."""
    train_fields = set(TrainConfig.model_fields)
    data = base.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        if key in train_fields:
            data["train"][key] = value
        elif key in ExperimentConfig.model_fields:
            data[key] = value
    train = data["train"]
    if overrides.get("patience") is None and train["patience"] > train["max_epochs"]:
        train["patience"] = train["max_epochs"]
    return ExperimentConfig(**data)


def with_config(func: Callable[..., R]) -> Callable[..., R]:
    """
    A decorator to inject configuration variables into a function.

    Args:
        func: The function to be decorated.

    Returns:
        The decorated function with injected configuration variables.
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> R:
        config = ConfigVars()
        return func(*args, config=config, **kwargs)

    return wrapper
