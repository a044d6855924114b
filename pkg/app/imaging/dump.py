"""Raw tensor dumps: a text header line ``H W C`` then little-endian float32 values."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from errors import FormatError


def write_tensor_dump(path: str | Path, tensor: np.ndarray) -> Path:
    """Write a 2- or 3-axis tensor; a 2-axis tensor is stored with C = 1."""
    array = np.asarray(tensor)
    if array.ndim == 2:
        array = array[:, :, None]
    if array.ndim != 3:
        raise ValueError(f"expected a 2- or 3-axis tensor, got shape {array.shape}")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    h, w, c = array.shape
    with open(out, "wb") as handle:
        handle.write(f"{h} {w} {c}\n".encode("ascii"))
        handle.write(np.ascontiguousarray(array, dtype="<f4").tobytes())
    return out


def read_tensor_dump(path: str | Path) -> np.ndarray:
    """Read a dump written by ``write_tensor_dump`` as an H x W x C float32 array."""
    data = Path(path).read_bytes()
    header, _, body = data.partition(b"\n")
    try:
        h, w, c = (int(v) for v in header.decode("ascii").split())
    except (UnicodeDecodeError, ValueError) as err:
        raise FormatError(f"bad tensor dump header in {path}") from err
    expected = h * w * c * 4
    if len(body) != expected:
        raise FormatError(f"{path}: expected {expected} data bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f4").reshape(h, w, c).astype(np.float32)
