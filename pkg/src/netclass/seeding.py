"""Deterministic seed derivation shared by every randomized component.

The pinned generator is numpy's PCG64 as built by ``numpy.random.default_rng``.
Independent streams are derived with :func:`derive_seed`, which hashes a
(master, index) pair through ``numpy.random.SeedSequence``.  The same master
seed therefore yields the same per-item streams regardless of scheduling or
worker-pool size.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(master: int, index: int) -> int:
    """Derive the 64-bit seed for stream `index` under `master`."""
    ss = np.random.SeedSequence((master & MASK64, index & MASK64))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    """Build the pinned PCG64 generator for a 64-bit seed."""
    return np.random.default_rng(seed & MASK64)
