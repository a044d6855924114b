"""
Model files.

Layout (all integers little-endian)::

    b"CHNT"                 magic
    uint32                  format version
    uint32 + bytes          architecture descriptor, UTF-8 JSON
    uint32                  number of parameter blobs
    per blob:
        uint16 + bytes      parameter name
        uint8 + bytes       numpy dtype string, e.g. "<f4"
        uint8               rank, then uint32 per axis
        raw little-endian values
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np
from errors import FormatError, VersionError
from log_tools import Logger
from tensornet import recurrent  # noqa: F401  (registers the gru kind)
from tensornet.layers import Layer
from tensornet.model import Model, SegmentMap

MAGIC = b"CHNT"
FORMAT_VERSION = 1

app_logger = Logger.get_app_logger()


def _read_exact(handle: BinaryIO, size: int) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise FormatError("model file is truncated")
    return data


def _read_uint(handle: BinaryIO, fmt: str) -> int:
    return int(struct.unpack(fmt, _read_exact(handle, struct.calcsize(fmt)))[0])


def model_to_bytes(model: Model) -> bytes:
    buffer = io.BytesIO()
    descriptor = json.dumps(model.describe(), sort_keys=True).encode("utf-8")
    buffer.write(MAGIC)
    buffer.write(struct.pack("<I", FORMAT_VERSION))
    buffer.write(struct.pack("<I", len(descriptor)))
    buffer.write(descriptor)
    params = model.named_parameters()
    buffer.write(struct.pack("<I", len(params)))
    for name, value in params:
        array = np.ascontiguousarray(value)
        dtype = array.dtype.newbyteorder("<")
        encoded_name = name.encode("utf-8")
        dtype_text = dtype.str.encode("ascii")
        buffer.write(struct.pack("<H", len(encoded_name)))
        buffer.write(encoded_name)
        buffer.write(struct.pack("<B", len(dtype_text)))
        buffer.write(dtype_text)
        buffer.write(struct.pack("<B", array.ndim))
        for axis in array.shape:
            buffer.write(struct.pack("<I", axis))
        buffer.write(array.astype(dtype, copy=False).tobytes())
    return buffer.getvalue()


def model_from_bytes(data: bytes) -> Model:
    handle = io.BytesIO(data)
    if _read_exact(handle, 4) != MAGIC:
        raise FormatError("not a model file (bad magic bytes)")
    version = _read_uint(handle, "<I")
    if version != FORMAT_VERSION:
        raise VersionError(
            f"model format version {version}; this build reads {FORMAT_VERSION}"
        )
    try:
        descriptor = json.loads(_read_exact(handle, _read_uint(handle, "<I")))
        layers = [Layer.from_config(config) for config in descriptor["layers"]]
        model = Model(
            layers,
            SegmentMap.from_list(descriptor["segments"]),
            tuple(descriptor["input_shape"]),
            dtype=descriptor["dtype"],
            metadata=descriptor["metadata"],
        )
    except (ValueError, KeyError, TypeError) as err:
        raise FormatError(f"bad architecture descriptor: {err}") from err

    blobs: dict[str, np.ndarray] = {}
    for _ in range(_read_uint(handle, "<I")):
        name = _read_exact(handle, _read_uint(handle, "<H")).decode("utf-8")
        dtype = np.dtype(_read_exact(handle, _read_uint(handle, "<B")).decode("ascii"))
        rank = _read_uint(handle, "<B")
        shape = tuple(_read_uint(handle, "<I") for _ in range(rank))
        size = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        blobs[name] = np.frombuffer(_read_exact(handle, size), dtype=dtype).reshape(
            shape
        )
    if handle.read(1):
        raise FormatError("trailing bytes after the last parameter blob")

    for name, current in model.named_parameters():
        blob = blobs.get(name)
        if blob is None or blob.shape != current.shape:
            raise FormatError(f"parameter {name} missing or mis-shaped in file")
        current[...] = blob.astype(current.dtype)
    return model


@Logger.log
def save_model(model: Model, path: str | Path) -> Path:
    """Write a model file; parent directories are created."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(model_to_bytes(model))
    app_logger.info("Saved model to %s", out)
    return out


def load_model(path: str | Path) -> Model:
    """
    Read a model file.

    Raises:
        FormatError: truncated or malformed file.
        VersionError: unsupported format version.
    """
    return model_from_bytes(Path(path).read_bytes())
