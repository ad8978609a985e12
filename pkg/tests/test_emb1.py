import struct

import numpy as np
import pytest

from vismem import load_embedding_file, write_embedding_file
from vismem.encoders import FileEncoder
from vismem.errors import (
    BadMagicError,
    DimensionMismatchError,
    DuplicateIdError,
    ExternalUnavailableError,
    TruncatedFileError,
)


def test_empty_file_roundtrip(tmp_path):
    path = tmp_path / "empty.emb1"
    write_embedding_file(path, 768, [])
    assert load_embedding_file(path) == {}
    assert load_embedding_file(path, expected_dim=768) == {}


def test_roundtrip_bit_identical(tmp_path):
    path = tmp_path / "three.emb1"
    vectors = {
        "a": np.array([0.25, -1.5, 3.0, 0.1], dtype=np.float32),
        "b": np.array([1e-7, 2e6, -0.0, 7.25], dtype=np.float32),
        "id with spaces / unicode é": np.arange(4, dtype=np.float32),
    }
    write_embedding_file(path, 4, vectors.items())
    loaded = load_embedding_file(path)
    assert list(loaded) == list(vectors)
    for rid in vectors:
        assert loaded[rid].dtype == np.float32
        assert np.array_equal(loaded[rid], vectors[rid])


def test_header_count_exceeding_records_is_truncated(tmp_path):
    path = tmp_path / "trunc.emb1"
    write_embedding_file(path, 2, [("a", [1.0, 2.0])])
    data = bytearray(path.read_bytes())
    data[8:16] = struct.pack("<Q", 5)  # claim 5 records
    path.write_bytes(bytes(data))
    with pytest.raises(TruncatedFileError):
        load_embedding_file(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.emb1"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(BadMagicError):
        load_embedding_file(path)


def test_duplicate_ids_rejected(tmp_path):
    path = tmp_path / "dup.emb1"
    with pytest.raises(DuplicateIdError):
        write_embedding_file(path, 2, [("a", [1, 2]), ("a", [3, 4])])
    # and on the read side, for files written by other tools
    write_embedding_file(path, 2, [("a", [1, 2]), ("b", [3, 4])])
    data = bytearray(path.read_bytes())
    data = data.replace(b"\x01\x00b", b"\x01\x00a")
    path.write_bytes(bytes(data))
    with pytest.raises(DuplicateIdError):
        load_embedding_file(path)


def test_dimension_checks(tmp_path):
    path = tmp_path / "dim.emb1"
    write_embedding_file(path, 3, [("a", [1, 2, 3])])
    with pytest.raises(DimensionMismatchError):
        load_embedding_file(path, expected_dim=4)
    with pytest.raises(DimensionMismatchError):
        write_embedding_file(path, 3, [("a", [1, 2])])


def test_file_encoder_lookup(tmp_path):
    path = tmp_path / "enc.emb1"
    write_embedding_file(path, 3, [("x", [1, 0, 0]), ("y", [0, 2, 0])])
    enc = FileEncoder(str(path))
    assert enc.dim == 3
    assert np.array_equal(enc.encode_item("y"), np.array([0, 2, 0], dtype=np.float32))
    with pytest.raises(ExternalUnavailableError):
        enc.encode_item("missing")
    with pytest.raises(ExternalUnavailableError):
        FileEncoder(str(tmp_path / "nope.emb1"))
