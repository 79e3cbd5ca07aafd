"""
Named random substreams derived from one root seed.

Every sampling stage asks for its own stream (``"incumbent"``, ``"cellular"``,
``"band-split"``...), optionally indexed by realization and attempt, so adding draws to one
stage never perturbs another and realizations can run in any order.
"""

import zlib

import numpy as np


class RandomStreams:
    """Factory of reproducible, independent numpy generators."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")

    def stream(self, name: str, *index: int) -> np.random.Generator:
        key = (zlib.crc32(name.encode("utf-8")),) + tuple(int(i) for i in index)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    def child(self, index: int) -> "RandomStreams":
        """Streams for an independent run (e.g. one seed of a multi-run study)."""
        derived = np.random.SeedSequence(self.seed, spawn_key=(index,)).generate_state(2, np.uint32)
        return RandomStreams(int(derived[0]) << 32 | int(derived[1]))

    def __repr__(self):
        return f"RandomStreams(seed={self.seed})"
