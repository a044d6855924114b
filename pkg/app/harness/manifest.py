"""Run directories and provenance manifests."""

from __future__ import annotations

import hashlib
import platform
from collections.abc import Sequence
from datetime import datetime
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field
from utils.common import generate_filename, get_timestamp

MANIFEST_FILE = "manifest.json"


def smiles_sha256(smiles: Sequence[str]) -> str:
    digest = hashlib.sha256()
    for text in smiles:
        digest.update(text.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """What was run, on what data, with which seeds."""

    command: str
    config: dict[str, Any]
    seeds: list[int]
    corpus_sha256: str
    reject_counts: dict[str, int] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    versions: dict[str, str] = Field(
        default_factory=lambda: {
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
    )
    created: str = Field(default_factory=lambda: datetime.now().isoformat())

    def determinism_fields(self) -> dict[str, Any]:
        """Everything except the wall-clock timestamp."""
        return self.model_dump(exclude={"created"})

    def save(self, run_dir: str | Path) -> Path:
        out = Path(run_dir) / MANIFEST_FILE
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return out

    @classmethod
    def load(cls, run_dir: str | Path) -> RunManifest:
        path = Path(run_dir)
        if path.is_dir():
            path = path / MANIFEST_FILE
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


def make_run_dir(
    output_dir: str | Path, command: str, out: str | Path | None = None
) -> Path:
    """``out`` if given, else ``<output_dir>/<command>_<timestamp>``."""
    if out is not None:
        run_dir = Path(out)
    else:
        run_dir = Path(output_dir) / f"{generate_filename(command)}_{get_timestamp()}"
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir
