"""Deterministic counter-based random streams (SplitMix64).

Every consumer derives an independent stream from (seed, path...) where the
path is a tuple of non-negative integers, e.g. (group_index, element_index)
for denoise sampling. The i-th draw of a stream is a pure function of
(seed, path, i), so streams can be evaluated in any order, on any thread,
in any language that reproduces the SplitMix64 mixing function.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment from the SplitMix64 paper


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit mix."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Stream:
    """One independent random stream.

    Stream key derivation: state = mix64(seed); then for each path component
    p, state = mix64(state ^ mix64(p + GAMMA)). Draw i (0-based) is
    mix64(state + (i + 1) * GAMMA).
    """

    __slots__ = ("_state", "_count")

    def __init__(self, seed: int, *path: int) -> None:
        state = mix64(seed & _MASK)
        for p in path:
            state = mix64(state ^ mix64((p + _GAMMA) & _MASK))
        self._state = state
        self._count = 0

    def next_u64(self) -> int:
        value = mix64((self._state + (self._count + 1) * _GAMMA) & _MASK)
        self._count += 1
        return value

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform in [lo, hi)."""
        return lo + (hi - lo) * self.next_float()
