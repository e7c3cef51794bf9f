"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from numpy ``Generator``
objects (PCG64).  Reproducibility across runs and across path fan-out is
pinned by ``substream``: a root seed plus an integer key tuple (for
example ``(path_index,)``) selects a fixed ``SeedSequence`` spawn key,
so path i is the same no matter how many paths are simulated or in what
order.
"""
from __future__ import annotations

import numpy as np

__all__ = ["substream", "as_generator"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream identified by ``key`` under ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def as_generator(rng) -> np.random.Generator:
    """Coerce None / int seed / Generator into a Generator."""
    if rng is None:
        return np.random.default_rng()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
