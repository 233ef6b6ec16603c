"""Counter-based, splittable random streams.

Every stream is a Philox4x64-10 generator (as shipped with numpy) whose
128-bit key is ``(seed, stream_id)`` and whose counter starts at zero.
Child streams are addressed by integer index and get the key
``(seed, derive_stream_id(parent_id, index))`` where the derivation is one
SplitMix64 finalisation step. The scheme only needs Philox and SplitMix64,
so substreams can be reproduced by any implementation that has both.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for state ``x`` (state advanced first)."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_stream_id(parent_id: int, index: int) -> int:
    """Identifier of child ``index`` of stream ``parent_id``."""
    if index < 0:
        raise ValueError("substream index must be non-negative")
    return splitmix64((parent_id * _GOLDEN + index + 1) & MASK64)


class RandomStream:
    """A keyed Philox stream plus a counter of hidden states drawn from it.

    A stream must be held by one caller at a time; use :meth:`spawn` to hand
    independent substreams to workers.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream_id = stream_id & MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))
        self.states_drawn = 0

    def spawn(self, index: int) -> RandomStream:
        return RandomStream(self.seed, derive_stream_id(self.stream_id, index))

    def take_ids(self, n: int) -> np.ndarray:
        """Reserve ``n`` consecutive draw indices for hidden states."""
        start = self.states_drawn
        self.states_drawn += n
        return np.arange(start, start + n, dtype=np.int64)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id:#018x})"
