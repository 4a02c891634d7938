"""Deterministic, splittable random streams.

Every randomized operation in this package is a pure function of its inputs
and an :class:`RngSpec`.  A spec is a (seed, stream_id) pair feeding a
counter-based Philox generator, and child streams are derived with a
SplitMix64-style mixing function, so parallel loops produce identical
results regardless of worker count or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix on 64-bit integers."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngSpec:
    """Seed plus stream identifier for one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, int) or not (0 <= value <= _MASK64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def child(self, index: int) -> "RngSpec":
        """Derive the ``index``-th substream of this spec.

        Distinct indices give independent streams; the derivation is pure,
        so any task keyed by its index draws the same numbers no matter
        which worker runs it.
        """
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        derived = mix64((self.stream_id + (index + 1) * _GOLDEN) & _MASK64)
        return RngSpec(self.seed, derived)

    def generator(self) -> np.random.Generator:
        """Philox generator keyed by (seed, stream_id)."""
        key = np.array([mix64(self.seed), mix64(self.stream_id ^ _GOLDEN)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))
