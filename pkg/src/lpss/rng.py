"""Seed handling.

Every random stream is a PCG64 generator.  Replication ``r`` of a study with
base seed ``s`` draws from ``SeedSequence(s, spawn_key=(r,))``, so a
replication's stream does not depend on which other replications ran or in
what order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def child_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),))


def child_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(child_seed(seed, index)))
