"""Deterministic splittable random streams.

Every stochastic component draws from a Philox counter-based generator
addressed by (seed, *key). The same coordinates always yield the same
stream, independent of execution order, so campaigns can run across worker
pools and still reproduce byte for byte.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream at coordinates (seed, *key)."""
    spawn = tuple(int(k) & 0xFFFFFFFF for k in key)
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn)
    return np.random.Generator(np.random.Philox(seq))


def name_seed(name: str) -> int:
    """Stable 32-bit seed component derived from a text label."""
    return zlib.crc32(name.encode("utf-8"))
