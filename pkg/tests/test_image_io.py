import numpy as np
import pytest

from vismem import ImageBuffer
from vismem.errors import BadMagicError, TruncatedFileError
from vismem.image import (
    decode_png,
    decode_raw,
    encode_png,
    encode_raw,
    read_image,
    write_png,
    write_raw,
)
from vismem.rng import make_generator


def test_buffer_validation():
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((4, 4, 2), dtype=np.uint8))  # 2 channels
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((4, 4, 3), dtype=np.float32))  # wrong dtype
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((0, 4, 1), dtype=np.uint8))  # empty


def test_buffer_from_flat_roundtrip():
    flat = list(range(24))
    img = ImageBuffer.from_flat(4, 2, 3, flat)
    assert img.width == 4 and img.height == 2 and img.channels == 3
    assert img.pixels.reshape(-1).tolist() == flat


def test_grayscale_promotes_2d():
    img = ImageBuffer(np.zeros((5, 7), dtype=np.uint8))
    assert img.channels == 1 and img.pixels.shape == (5, 7, 1)


@pytest.mark.parametrize("channels", [1, 3])
def test_png_roundtrip_random(channels):
    rng = make_generator(7)
    px = rng.integers(0, 256, size=(19, 23, channels)).astype(np.uint8)
    img = ImageBuffer(px)
    back = decode_png(encode_png(img))
    assert np.array_equal(back.pixels, img.pixels)


def test_png_write_is_deterministic(tmp_path):
    rng = make_generator(8)
    img = ImageBuffer(rng.integers(0, 256, size=(16, 16, 3)).astype(np.uint8))
    assert encode_png(img) == encode_png(img)


def test_png_rejects_garbage():
    with pytest.raises(BadMagicError):
        decode_png(b"not a png at all")


def test_png_all_filters_decode():
    # hand-build a 4x4 grayscale PNG using every filter type once
    import struct
    import zlib

    from vismem.image import _PNG_SIGNATURE, _png_chunk

    rows = np.array(
        [[10, 20, 30, 40],
         [15, 25, 35, 45],
         [12, 22, 32, 42],
         [90, 80, 70, 60]], dtype=np.uint8)

    def filt_sub(row, prev):
        out = row.astype(np.int32).copy()
        for x in range(len(row) - 1, 0, -1):
            out[x] = (out[x] - out[x - 1]) % 256
        return out.astype(np.uint8)

    def filt_up(row, prev):
        return ((row.astype(np.int32) - prev) % 256).astype(np.uint8)

    def filt_avg(row, prev):
        out = np.zeros_like(row)
        for x in range(len(row)):
            left = int(row[x - 1]) if x > 0 else 0
            out[x] = (int(row[x]) - ((left + int(prev[x])) >> 1)) % 256
        return out

    def filt_paeth(row, prev):
        from vismem.image import _paeth
        out = np.zeros_like(row)
        for x in range(len(row)):
            left = int(row[x - 1]) if x > 0 else 0
            upleft = int(prev[x - 1]) if x > 0 else 0
            out[x] = (int(row[x]) - _paeth(left, int(prev[x]), upleft)) % 256
        return out

    scan = b"\x00" + rows[0].tobytes()
    scan += b"\x01" + filt_sub(rows[1], rows[0]).tobytes()
    scan += b"\x02" + filt_up(rows[2], rows[1]).tobytes()
    scan += b"\x03" + filt_avg(rows[3], rows[2]).tobytes()
    ihdr = struct.pack(">IIBBBBB", 4, 4, 8, 0, 0, 0, 0)
    data = (_PNG_SIGNATURE + _png_chunk(b"IHDR", ihdr)
            + _png_chunk(b"IDAT", zlib.compress(scan))
            + _png_chunk(b"IEND", b""))
    img = decode_png(data)
    assert np.array_equal(img.pixels[:, :, 0], rows)

    # paeth variant for the last row
    scan4 = scan[: 1 + 4 + 1 + 4 + 1 + 4] + b"\x04" + filt_paeth(rows[3], rows[2]).tobytes()
    data4 = (_PNG_SIGNATURE + _png_chunk(b"IHDR", ihdr)
             + _png_chunk(b"IDAT", zlib.compress(scan4))
             + _png_chunk(b"IEND", b""))
    img4 = decode_png(data4)
    assert np.array_equal(img4.pixels[:, :, 0], rows)


def test_png_truncated_idat():
    img = ImageBuffer.constant(8, 8, 1, 100)
    data = encode_png(img)
    with pytest.raises((TruncatedFileError, Exception)):
        decode_png(data[:40])


@pytest.mark.parametrize("channels", [1, 3])
def test_raw_roundtrip(channels, tmp_path):
    rng = make_generator(9)
    img = ImageBuffer(rng.integers(0, 256, size=(11, 13, channels)).astype(np.uint8))
    back = decode_raw(encode_raw(img))
    assert np.array_equal(back.pixels, img.pixels)
    write_raw(tmp_path / "x.raw", img)
    assert np.array_equal(read_image(tmp_path / "x.raw").pixels, img.pixels)


def test_raw_truncated():
    img = ImageBuffer.constant(8, 8, 3, 5)
    data = encode_raw(img)
    with pytest.raises(TruncatedFileError):
        decode_raw(data[:-10])


def test_read_image_dispatch(tmp_path):
    img = ImageBuffer.constant(6, 4, 3, 77)
    write_png(tmp_path / "a.png", img)
    assert np.array_equal(read_image(tmp_path / "a.png").pixels, img.pixels)
    (tmp_path / "junk.bin").write_bytes(b"???")
    with pytest.raises(BadMagicError):
        read_image(tmp_path / "junk.bin")
