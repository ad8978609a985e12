"""Seeding and random-stream derivation.

All randomness in the package flows through numpy's Philox bit generator,
which is counter-based and produces identical streams on every platform
and for any thread count. Independent streams are derived, never shared:

* ``make_generator(seed)`` — the root stream for one named seed.
* ``derive_seed(base, name)`` — a child seed obtained by XOR-ing the base
  with a 64-bit BLAKE2b hash of a string (an image id, a grid-cell label,
  a stream name). Deriving per item means results do not depend on the
  order in which items are processed.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def hash_id(name: str) -> int:
    """Stable 64-bit hash of a string (BLAKE2b, little-endian)."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(base: int, name: str) -> int:
    """Child seed for a named sub-stream: ``base XOR hash_id(name)``."""
    return (int(base) ^ hash_id(name)) & _MASK64


def make_generator(seed: int) -> np.random.Generator:
    """Portable generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
