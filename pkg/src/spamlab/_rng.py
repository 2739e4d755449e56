"""Seed derivation.

Every stochastic stage draws from ``numpy.random.Generator`` backed by PCG64.
A stage seed is derived from the run seed and the stage name through
``numpy.random.SeedSequence``, so stages never share a stream and the
derivation does not depend on the order in which stages run::

    derive_seed(seed, "balance") == SeedSequence(seed, spawn_key=(crc32(b"balance"),)).generate_state(1)[0]
"""
from __future__ import annotations

import zlib

import numpy as np


def derive_seed(seed: int, *stage: str | int) -> int:
    key = tuple(zlib.crc32(str(s).encode("utf-8")) for s in stage)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))
