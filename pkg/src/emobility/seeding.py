"""Deterministic RNG stream derivation.

Every stochastic component derives its generator as
``numpy.random.Generator(PCG64(SeedSequence([seed, *path])))`` where ``path``
is a fixed tuple of small integers identifying the consumer (planner run,
benchmark cell, episode, ...). Identical (seed, path) always yields the same
stream regardless of scheduling order. Bit-equality across other
implementations is a non-goal; reproducibility within this one is guaranteed.
"""
from __future__ import annotations

import numpy as np


def rng_from(seed, *path):
    """Generator for the stream identified by (seed, *path)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, path)])))


def int_seed(seed, *path):
    """64-bit integer derived from (seed, *path), for stdlib random.Random."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1, np.uint64)[0])
