"""Reproducible multi-stream random number generation.

Every stochastic routine in this package draws from a numpy Generator that
is owned by an RngStream.  A stream is identified by (seed, stream_index);
the same pair always reproduces the same byte sequence, so Monte Carlo
replicas get stream_index = replica number and can run in any order or in
parallel without affecting results.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "as_generator"]


@dataclass(frozen=True)
class RngStream:
    """Identifier of an independent, reproducible random stream."""

    seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> "RngStream":
        """Stream with the same seed and a different index."""
        return RngStream(self.seed, index)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a Generator, or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot interpret {type(rng).__name__} as a random source")


def kernel_seed(gen: np.random.Generator) -> int:
    """Draw a 32-bit seed for a compiled kernel from the given stream."""
    return int(gen.integers(0, 2**32 - 1, dtype=np.uint32))
