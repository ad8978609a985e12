"""Embedding vectors and the EMB1 interchange file.

Embeddings are 1-D float32 numpy arrays: float32 is the boundary
precision (what pretrained encoders emit and what EMB1 stores), and all
distance arithmetic widens to float64 internally. ``as_embedding``
normalizes anything array-like to that contract and rejects NaN/inf.

EMB1 layout (little-endian throughout):

    magic  b"EMB1"
    u32    dim
    u64    record count
    per record:
        u16    id byte length
        bytes  id (UTF-8)
        f32[]  dim values
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    DimensionMismatchError,
    DuplicateIdError,
    TruncatedFileError,
)

_MAGIC = b"EMB1"


def as_embedding(values, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float32 vector, optionally checking length."""
    arr = np.asarray(values, dtype=np.float32).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding contains NaN or infinity")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"expected dim {dim}, got {arr.size}")
    return arr


def write_embedding_file(path: str | Path, dim: int, records) -> int:
    """Write ``(id, vector)`` pairs as EMB1. Returns the record count."""
    items = [(str(rid), as_embedding(vec, dim)) for rid, vec in records]
    seen = set()
    for rid, _ in items:
        if rid in seen:
            raise DuplicateIdError(f"duplicate id {rid!r}")
        seen.add(rid)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<Q", len(items)))
        for rid, vec in items:
            encoded = rid.encode("utf-8")
            if len(encoded) > 0xFFFF:
                raise ValueError(f"id too long: {rid[:32]!r}...")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(vec.astype("<f4").tobytes())
    return len(items)


def load_embedding_file(path: str | Path, expected_dim: int | None = None) -> dict[str, np.ndarray]:
    """Read an EMB1 file into an ordered ``{id: float32 vector}`` map."""
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise BadMagicError(f"{path}: not an EMB1 file")
    if len(data) < 16:
        raise TruncatedFileError(f"{path}: header ended early")
    (dim,) = struct.unpack("<I", data[4:8])
    (count,) = struct.unpack("<Q", data[8:16])
    if expected_dim is not None and dim != expected_dim:
        raise DimensionMismatchError(f"{path}: file dim {dim}, expected {expected_dim}")
    out: dict[str, np.ndarray] = {}
    pos = 16
    vec_bytes = 4 * dim
    for i in range(count):
        if pos + 2 > len(data):
            raise TruncatedFileError(f"{path}: record {i} header ended early")
        (id_len,) = struct.unpack("<H", data[pos : pos + 2])
        pos += 2
        if pos + id_len + vec_bytes > len(data):
            raise TruncatedFileError(f"{path}: record {i} ended early")
        rid = data[pos : pos + id_len].decode("utf-8")
        pos += id_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=pos).copy()
        pos += vec_bytes
        if rid in out:
            raise DuplicateIdError(f"{path}: duplicate id {rid!r}")
        out[rid] = vec
    return out
