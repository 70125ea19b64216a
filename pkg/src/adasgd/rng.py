"""Seeded random streams.

The bit generator is pinned to PCG64 (O'Neill's permuted congruential
generator, 128-bit state, XSL-RR 64-bit output) and must not be changed:
every frozen value in the test suite depends on it. A stream is identified by
``(seed, stream_id)``; the pair is hashed through numpy's ``SeedSequence`` so
per-trial streams are independent and do not depend on scheduling order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BIT_GENERATOR = "PCG64"
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "RngStream":
        """Stream for sub-experiment ``index``, derived by hashing (seed, stream, index)."""
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream), int(index)))
        return RngStream(int(ss.generate_state(1, np.uint64)[0]), int(index))


def trial_streams(seed: int, trials: int, offset: int = 0) -> list[RngStream]:
    return [RngStream(seed, offset + i) for i in range(trials)]


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")
