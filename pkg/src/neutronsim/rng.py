"""Seeded, splittable random streams.

Every experiment run owns a master seed; each consumer (source noise,
splitter output selection, absorbers, analyzer, shutter coin flips,
arrival times) draws from its own counter-based Philox substream so
that runs are bit-reproducible and adding draws to one consumer never
perturbs another.
"""

from __future__ import annotations

import numpy as np

# Fixed substream labels; the spawn key makes the streams independent.
STREAMS = ("source", "splitter", "absorber", "analyzer", "shutter",
           "arrival", "setting")


class RandomStream:
    """Buffered uniform [0, 1) draws from one Philox substream."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, seed_seq: np.random.SeedSequence, block: int = 65536):
        self._gen = np.random.Generator(np.random.Philox(seed_seq))
        self._buf = self._gen.random(block)
        self._pos = 0

    def uniform(self) -> float:
        buf = self._buf
        pos = self._pos
        if pos == buf.size:
            self._buf = buf = self._gen.random(buf.size)
            pos = 0
        self._pos = pos + 1
        return buf[pos]

    def uniform_array(self, n: int) -> np.ndarray:
        # Bypasses the buffer; fine because the buffer never mixes with
        # array draws inside one consumer.
        return self._gen.random(n)


class RngStreams:
    """The named substreams of one run (or one replica/sweep cell)."""

    def __init__(self, seed: int, cell: int | None = None):
        root = np.random.SeedSequence(seed)
        if cell is not None:
            root = np.random.SeedSequence(seed, spawn_key=(cell,))
        children = root.spawn(len(STREAMS))
        for name, child in zip(STREAMS, children):
            setattr(self, name, RandomStream(child))
