"""8-bit raster images and their on-disk formats.

An image is a numpy ``uint8`` array of shape ``(height, width, channels)``
with 1 (grayscale) or 3 (RGB) channels, wrapped in :class:`ImageBuffer`.
Two file formats are supported, both chosen so tests can be bit-exact:

* PNG — 8-bit grayscale or truecolor, non-interlaced. The internal codec
  reads all five scanline filters and writes filter 0 with a fixed zlib
  level, so identical pixels always produce identical bytes.
* RAW1 — a trivial planar format: magic ``RAW1``, u32 LE width, u32 LE
  height, u8 channel count, then one ``height*width`` plane per channel.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagicError, ParseError, TruncatedFileError

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_RAW_MAGIC = b"RAW1"


@dataclass
class ImageBuffer:
    """A raster image: ``pixels`` is ``(height, width, channels)`` uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, np.newaxis]
        if px.ndim != 3:
            raise ValueError(f"pixels must be (h, w, c), got shape {px.shape}")
        if px.shape[2] not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {px.shape[2]}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must have at least one pixel")
        if px.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {px.dtype}")
        self.pixels = px

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def copy(self) -> "ImageBuffer":
        return ImageBuffer(self.pixels.copy())

    @classmethod
    def from_flat(cls, width: int, height: int, channels: int, flat) -> "ImageBuffer":
        """Build from a row-major flat sequence of length w*h*c."""
        arr = np.asarray(flat, dtype=np.uint8)
        if arr.size != width * height * channels:
            raise ValueError(
                f"expected {width * height * channels} values, got {arr.size}"
            )
        return cls(arr.reshape(height, width, channels))

    @classmethod
    def constant(cls, width: int, height: int, channels: int = 1, value: int = 0) -> "ImageBuffer":
        return cls(np.full((height, width, channels), value, dtype=np.uint8))


# ---------------------------------------------------------------------------
# PNG
# ---------------------------------------------------------------------------

def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode_png(img: ImageBuffer) -> bytes:
    """Serialize to PNG bytes (filter 0 on every scanline, zlib level 6)."""
    color_type = 0 if img.channels == 1 else 2
    ihdr = struct.pack(">IIBBBBB", img.width, img.height, 8, color_type, 0, 0, 0)
    raw = img.pixels.tobytes()
    stride = img.width * img.channels
    scanlines = b"".join(
        b"\x00" + raw[y * stride : (y + 1) * stride] for y in range(img.height)
    )
    idat = zlib.compress(scanlines, 6)
    return (
        _PNG_SIGNATURE
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", idat)
        + _png_chunk(b"IEND", b"")
    )


def write_png(path: str | Path, img: ImageBuffer) -> None:
    Path(path).write_bytes(encode_png(img))


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _unfilter(data: bytes, height: int, stride: int, bpp: int) -> np.ndarray:
    out = np.zeros((height, stride), dtype=np.uint8)
    pos = 0
    prev = np.zeros(stride, dtype=np.int32)
    for y in range(height):
        if pos + 1 + stride > len(data):
            raise TruncatedFileError("PNG: scanline data ended early")
        ftype = data[pos]
        line = np.frombuffer(data, dtype=np.uint8, count=stride, offset=pos + 1).astype(np.int32)
        pos += 1 + stride
        if ftype == 0:
            cur = line
        elif ftype == 1:  # Sub
            cur = line.copy()
            for x in range(bpp, stride):
                cur[x] = (cur[x] + cur[x - bpp]) & 0xFF
        elif ftype == 2:  # Up
            cur = (line + prev) & 0xFF
        elif ftype == 3:  # Average
            cur = line.copy()
            for x in range(stride):
                left = cur[x - bpp] if x >= bpp else 0
                cur[x] = (cur[x] + ((left + prev[x]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            cur = line.copy()
            for x in range(stride):
                left = int(cur[x - bpp]) if x >= bpp else 0
                upleft = int(prev[x - bpp]) if x >= bpp else 0
                cur[x] = (cur[x] + _paeth(left, int(prev[x]), upleft)) & 0xFF
        else:
            raise ParseError(f"PNG: unknown filter type {ftype}")
        out[y] = cur.astype(np.uint8)
        prev = cur
    return out


def decode_png(data: bytes) -> ImageBuffer:
    """Parse PNG bytes. Supports 8-bit gray / RGB, non-interlaced."""
    if data[: len(_PNG_SIGNATURE)] != _PNG_SIGNATURE:
        raise BadMagicError("not a PNG file")
    pos = len(_PNG_SIGNATURE)
    width = height = None
    channels = 0
    idat = bytearray()
    while pos < len(data):
        if pos + 8 > len(data):
            raise TruncatedFileError("PNG: chunk header ended early")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        if len(payload) < length:
            raise TruncatedFileError("PNG: chunk payload ended early")
        pos += 12 + length  # length + tag + payload + crc
        if tag == b"IHDR":
            width, height, depth, color, _, _, interlace = struct.unpack(
                ">IIBBBBB", payload
            )
            if depth != 8:
                raise ParseError(f"PNG: unsupported bit depth {depth}")
            if interlace != 0:
                raise ParseError("PNG: interlaced images are not supported")
            if color == 0:
                channels = 1
            elif color == 2:
                channels = 3
            else:
                raise ParseError(f"PNG: unsupported color type {color}")
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if width is None:
        raise ParseError("PNG: missing IHDR")
    raw = zlib.decompress(bytes(idat))
    stride = width * channels
    pixels = _unfilter(raw, height, stride, channels)
    return ImageBuffer(pixels.reshape(height, width, channels))


def read_png(path: str | Path) -> ImageBuffer:
    return decode_png(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# RAW1 planar
# ---------------------------------------------------------------------------

def encode_raw(img: ImageBuffer) -> bytes:
    planes = np.ascontiguousarray(np.moveaxis(img.pixels, 2, 0))
    header = _RAW_MAGIC + struct.pack("<IIB", img.width, img.height, img.channels)
    return header + planes.tobytes()


def write_raw(path: str | Path, img: ImageBuffer) -> None:
    Path(path).write_bytes(encode_raw(img))


def decode_raw(data: bytes) -> ImageBuffer:
    if data[:4] != _RAW_MAGIC:
        raise BadMagicError("not a RAW1 file")
    if len(data) < 13:
        raise TruncatedFileError("RAW1: header ended early")
    width, height, channels = struct.unpack("<IIB", data[4:13])
    if channels not in (1, 3):
        raise ParseError(f"RAW1: unsupported channel count {channels}")
    need = width * height * channels
    body = data[13:]
    if len(body) < need:
        raise TruncatedFileError(f"RAW1: expected {need} pixel bytes, got {len(body)}")
    planes = np.frombuffer(body, dtype=np.uint8, count=need).reshape(channels, height, width)
    return ImageBuffer(np.ascontiguousarray(np.moveaxis(planes, 0, 2)))


def read_raw(path: str | Path) -> ImageBuffer:
    return decode_raw(Path(path).read_bytes())


def read_image(path: str | Path) -> ImageBuffer:
    """Load a PNG or RAW1 image, dispatching on the file's magic bytes."""
    data = Path(path).read_bytes()
    if data[: len(_PNG_SIGNATURE)] == _PNG_SIGNATURE:
        return decode_png(data)
    if data[:4] == _RAW_MAGIC:
        return decode_raw(data)
    raise BadMagicError(f"{path}: neither PNG nor RAW1")
