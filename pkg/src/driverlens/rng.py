"""Seed plumbing: named random streams derived from one master seed.

Every source of randomness in the pipeline draws from a stream addressed by
(master seed, label, index). Streams are independent of each other and of the
order in which they are created, so adding a model or an explanation does not
perturb any other stream, and parallel execution reproduces serial results.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, label: str, index: int = 0) -> int:
    """Stable 64-bit sub-seed for the stream named (label, index)."""
    digest = hashlib.sha256(f"{master_seed}:{label}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def stream(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Generator for a named sub-stream of the master seed."""
    return np.random.default_rng(derive_seed(master_seed, label, index))


def xor_seed(seed: int, index: int) -> int:
    """Per-member seed for homogeneous collections (trees, instances)."""
    return (int(seed) ^ int(index)) & _MASK64


def as_generator(rng: int | np.random.Generator | None) -> np.random.Generator:
    """Accept an integer seed, an existing Generator, or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
