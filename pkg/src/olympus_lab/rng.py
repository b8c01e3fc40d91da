"""Project-wide random number generation.

Every stochastic routine draws from numpy's PCG64 generator.  Child streams
are derived from a master seed with :class:`numpy.random.SeedSequence` using
``spawn_key``: the stream for purpose ``tag`` and index ``i`` is

    SeedSequence(entropy=master, spawn_key=(TAGS[tag], i, ...))

so the same (master, tag, index) always yields the same stream no matter how
work is split across workers.
"""
from __future__ import annotations

import numpy as np

TAGS = {
    "ics": 1,
    "rules": 2,
    "mh": 3,
    "walk": 4,
    "cloud": 5,
    "ga": 6,
    "csample": 7,
    "noise": 8,
}


def seed_sequence(seed, *key) -> np.random.SeedSequence:
    """Child seed sequence for ``key`` under ``seed``.

    ``seed`` may be an int or an existing SeedSequence; string parts of ``key``
    are mapped through :data:`TAGS`.
    """
    spawn = tuple(TAGS[k] if isinstance(k, str) else int(k) for k in key)
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key + spawn)
    if seed is None:
        raise ValueError("a master seed is required")
    return np.random.SeedSequence(int(seed), spawn_key=spawn)


def generator(seed, *key) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def random_words(seed, shape) -> np.ndarray:
    """Raw 64-bit PCG64 outputs; every bit is an independent fair coin."""
    bg = np.random.PCG64(seed if isinstance(seed, np.random.SeedSequence) else seed_sequence(seed))
    return bg.random_raw(shape).astype(np.uint64)
