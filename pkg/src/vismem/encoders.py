"""Encoders: deterministic projections from images to embedding vectors.

Two built-in encoders make the engine self-contained:

* ``DownsampleMeanEncoder`` — a g x g grid of per-cell, per-channel mean
  pixel values scaled to [0, 1]. It keeps only low-spatial-frequency
  content, so images that differ only in fine texture land close
  together in embedding space.
* ``RandomProjectionEncoder`` — a seeded dense Gaussian projection of the
  flattened [0, 1] pixels. Linear and approximately distance-preserving,
  so pixel-space geometry carries over to the embedding.

Pretrained-model embeddings enter through ``FileEncoder`` (EMB1 files,
looked up by item id) or ``StdioEncoder`` (a live subprocess speaking the
JSON-lines protocol in :mod:`vismem.stdio_client`). All encoders expose
``dim`` and ``encode_item(item_id, image)``; content-based encoders also
expose ``encode(image)``. Identical inputs always produce bit-identical
float32 outputs.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .embedding import as_embedding, load_embedding_file
from .errors import (
    DimensionMismatchError,
    ExternalUnavailableError,
    GridTooFineError,
)
from .image import ImageBuffer
from .rng import derive_seed, make_generator


class EncoderKind(str, Enum):
    DOWNSAMPLE = "downsample"
    RANDOM_PROJECTION = "random-projection"
    EXTERNAL_FILE = "file"
    EXTERNAL_STDIO = "stdio"


@dataclass(frozen=True)
class EncoderDescriptor:
    """Serializable recipe for constructing an encoder.

    ``dim`` may be omitted for the downsample kind when ``channels`` is
    given (it is then ``grid * grid * channels``).
    """

    kind: EncoderKind
    name: str = ""
    dim: int | None = None
    grid: int | None = None
    seed: int = 0
    channels: int = 3
    path: str | None = None
    command: tuple[str, ...] | None = None

    def resolved_dim(self) -> int:
        if self.dim is not None:
            return self.dim
        if self.kind is EncoderKind.DOWNSAMPLE and self.grid is not None:
            return self.grid * self.grid * self.channels
        raise ValueError(f"cannot infer dim for encoder {self.name or self.kind}")


# ---------------------------------------------------------------------------
# free-function forms
# ---------------------------------------------------------------------------

def downsample_mean_encode(img: ImageBuffer, grid: int) -> np.ndarray:
    """Per-cell mean pixel values scaled to [0, 1].

    The image is partitioned into ``grid x grid`` cells per channel (cell
    boundaries at ``floor(i * extent / grid)``, so uneven sizes are
    allowed). Components are ordered cells left-to-right, top-to-bottom,
    channel-minor, giving ``dim = grid * grid * channels``.
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    h, w = img.height, img.width
    if grid > min(w, h):
        raise GridTooFineError(f"grid {grid} exceeds min(width, height) = {min(w, h)}")
    row_edges = (np.arange(grid + 1) * h) // grid
    col_edges = (np.arange(grid + 1) * w) // grid
    px = img.pixels.astype(np.float64)
    rows = np.add.reduceat(px, row_edges[:-1], axis=0)
    cells = np.add.reduceat(rows, col_edges[:-1], axis=1)
    counts = np.diff(row_edges)[:, None] * np.diff(col_edges)[None, :]
    means = cells / counts[:, :, None]
    return as_embedding(means.reshape(-1) / 255.0)


_MATRIX_CACHE: OrderedDict[tuple[int, int, int], np.ndarray] = OrderedDict()
_MATRIX_CACHE_SLOTS = 4


def _projection_matrix(seed: int, n_pixels: int, dim: int) -> np.ndarray:
    # One matrix per (seed, input size, dim); entries iid Normal(0, 1/dim).
    key = (seed, n_pixels, dim)
    if key not in _MATRIX_CACHE:
        rng = make_generator(derive_seed(seed, f"proj:{n_pixels}:{dim}"))
        matrix = rng.standard_normal((dim, n_pixels)) / np.sqrt(dim)
        _MATRIX_CACHE[key] = matrix
        while len(_MATRIX_CACHE) > _MATRIX_CACHE_SLOTS:
            _MATRIX_CACHE.popitem(last=False)
    return _MATRIX_CACHE[key]


def random_projection_encode(img: ImageBuffer, dim: int, seed: int) -> np.ndarray:
    """Seeded dense Gaussian projection of the flattened [0, 1] pixels."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    flat = img.pixels.reshape(-1).astype(np.float64) / 255.0
    matrix = _projection_matrix(seed, flat.size, dim)
    return as_embedding(matrix @ flat)


# ---------------------------------------------------------------------------
# encoder objects
# ---------------------------------------------------------------------------

class Encoder:
    """Uniform interface: ``dim`` plus ``encode_item(item_id, image)``."""

    name: str = ""
    dim: int = 0

    def encode(self, img: ImageBuffer) -> np.ndarray:
        raise NotImplementedError

    def encode_item(self, item_id: str, img: ImageBuffer | None) -> np.ndarray:
        if img is None:
            raise ValueError(f"encoder {self.name!r} needs image content for {item_id!r}")
        out = self.encode(img)
        if out.size != self.dim:
            raise DimensionMismatchError(
                f"encoder {self.name!r} produced dim {out.size}, declared {self.dim}"
            )
        return out


class DownsampleMeanEncoder(Encoder):
    def __init__(self, grid: int, channels: int = 3, name: str | None = None):
        self.grid = grid
        self.dim = grid * grid * channels
        self.name = name or f"downsample-g{grid}"

    def encode(self, img: ImageBuffer) -> np.ndarray:
        return downsample_mean_encode(img, self.grid)


class RandomProjectionEncoder(Encoder):
    def __init__(self, dim: int, seed: int = 0, name: str | None = None):
        self.dim = dim
        self.seed = seed
        self.name = name or f"randproj-d{dim}"

    def encode(self, img: ImageBuffer) -> np.ndarray:
        return random_projection_encode(img, self.dim, self.seed)


class FileEncoder(Encoder):
    """Embeddings precomputed into an EMB1 file, looked up by item id."""

    def __init__(self, path: str, dim: int | None = None, name: str | None = None):
        try:
            self.records = load_embedding_file(path, expected_dim=dim)
        except FileNotFoundError as exc:
            raise ExternalUnavailableError(f"embedding file missing: {path}") from exc
        if dim is None:
            if not self.records:
                raise ExternalUnavailableError(f"{path}: empty embedding file and no dim given")
            dim = next(iter(self.records.values())).size
        self.dim = dim
        self.path = str(path)
        self.name = name or f"file:{path}"

    def encode(self, img: ImageBuffer) -> np.ndarray:
        raise ExternalUnavailableError(
            f"encoder {self.name!r} is id-indexed; use encode_item"
        )

    def encode_item(self, item_id: str, img: ImageBuffer | None = None) -> np.ndarray:
        try:
            return self.records[item_id]
        except KeyError as exc:
            raise ExternalUnavailableError(
                f"{self.path}: no embedding for id {item_id!r}"
            ) from exc


class StdioEncoder(Encoder):
    """Live external encoder: item ids are resolved to paths, the peer
    process reads the images itself."""

    def __init__(self, client, dim: int, path_resolver: Callable[[str], str], name: str | None = None):
        self.client = client
        self.dim = dim
        self.path_resolver = path_resolver
        self.name = name or "stdio"

    def encode(self, img: ImageBuffer) -> np.ndarray:
        raise ExternalUnavailableError(
            f"encoder {self.name!r} is path-indexed; use encode_item"
        )

    def encode_item(self, item_id: str, img: ImageBuffer | None = None) -> np.ndarray:
        path = self.path_resolver(item_id)
        result = self.client.encode_batch([(item_id, path)], expected_dim=self.dim)
        return result[item_id]


def make_encoder(desc: EncoderDescriptor, path_resolver: Callable[[str], str] | None = None) -> Encoder:
    """Construct the encoder an :class:`EncoderDescriptor` describes."""
    if desc.kind is EncoderKind.DOWNSAMPLE:
        if desc.grid is None:
            raise ValueError("downsample encoder needs a grid")
        enc = DownsampleMeanEncoder(desc.grid, desc.channels, name=desc.name or None)
    elif desc.kind is EncoderKind.RANDOM_PROJECTION:
        enc = RandomProjectionEncoder(desc.resolved_dim(), desc.seed, name=desc.name or None)
    elif desc.kind is EncoderKind.EXTERNAL_FILE:
        if desc.path is None:
            raise ValueError("file encoder needs a path")
        enc = FileEncoder(desc.path, desc.dim, name=desc.name or None)
    elif desc.kind is EncoderKind.EXTERNAL_STDIO:
        from .stdio_client import StdioEncoderClient

        if not desc.command:
            raise ValueError("stdio encoder needs a command")
        if path_resolver is None:
            raise ValueError("stdio encoder needs a path resolver")
        client = StdioEncoderClient(list(desc.command))
        enc = StdioEncoder(client, desc.resolved_dim(), path_resolver, name=desc.name or None)
    else:
        raise ValueError(f"unknown encoder kind {desc.kind!r}")
    if desc.dim is not None and enc.dim != desc.dim:
        raise DimensionMismatchError(
            f"descriptor dim {desc.dim} != encoder dim {enc.dim}"
        )
    return enc


def encode(desc: EncoderDescriptor, img: ImageBuffer) -> np.ndarray:
    """One-shot content-based encoding from a descriptor."""
    return make_encoder(desc).encode_item("", img)
