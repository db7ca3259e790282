"""Reproducible random streams.

Every stream is a Philox4x64-10 counter-based generator (numpy's
``Philox``) whose 128-bit key is the first 16 bytes of
``blake2b(repr((seed, *labels)))``. Streams for different labels (qubit
index, replay index, purpose) are therefore independent of each other and
of the order in which they are created, and a given ``(seed, labels)`` pair
yields the same numbers on every platform and thread count.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

SEED_ENV = "SHOTVAR_SEED"
DEFAULT_SEED = 20240913


def default_seed() -> int:
    value = os.environ.get(SEED_ENV)
    return int(value) if value not in (None, "") else DEFAULT_SEED


def stream_key(seed: int, *labels) -> np.ndarray:
    h = hashlib.blake2b(repr((int(seed),) + tuple(labels)).encode(), digest_size=16)
    return np.frombuffer(h.digest(), dtype="<u8").copy()


def stream(seed: int, *labels) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, *labels)))


def derive_seed(seed: int, *labels) -> int:
    """A 63-bit integer seed for a labelled sub-experiment (e.g. a replay)."""
    return int(stream_key(seed, "derive", *labels)[0] >> np.uint64(1))
