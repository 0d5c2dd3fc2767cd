"""Seedable, splittable random streams.

Every sampler in this package is a pure function of an explicit RngStream:
identical (seed, stream_id) pairs reproduce the exact draw sequence, and
distinct stream_ids give statistically independent streams.  Concurrent
workers must each own their own stream_id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# child() packs (parent stream, index) into one id; indices must stay below this
_CHILD_SPAN = 1 << 24


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator; repeated calls restart the same sequence."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)

    def child(self, index: int) -> "RngStream":
        """Derived independent stream, e.g. one per replication or worker."""
        if not 0 <= index < _CHILD_SPAN:
            raise ValueError(f"child index out of range: {index}")
        return RngStream(self.seed, (self.stream_id + 1) * _CHILD_SPAN + index)
