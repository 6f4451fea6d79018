"""Deterministic random streams via SplitMix64.

All randomness in the library and CLI flows through this generator so that
identical seeds give byte-identical reports on every platform.  The i-th
draw of a stream with seed s mixes the state s + (i+1)*GAMMA:

    z  = state
    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

with GAMMA = 0x9E3779B97F4A7C15 and all arithmetic mod 2^64.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(state: np.ndarray) -> np.ndarray:
    z = state.copy()
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def raw64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """`count` raw 64-bit draws from the stream `seed`, starting at `offset`."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * GAMMA
        return _mix(state)


def uniform(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Uniform doubles in [0, 1) using the top 53 bits of each draw."""
    bits = raw64(seed, count, offset) >> np.uint64(11)
    return bits.astype(np.float64) * (1.0 / (1 << 53))


def symmetric(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Uniform doubles in [-1, 1)."""
    return 2.0 * uniform(seed, count, offset) - 1.0


def random_biquats(seed: int, count: int) -> np.ndarray:
    """(count, 4) complex array, re and im of every component in [-1, 1)."""
    flat = symmetric(seed, count * 8)
    re = flat[: count * 4].reshape(count, 4)
    im = flat[count * 4 :].reshape(count, 4)
    return re + 1j * im


def subseed(seed: int, tag: str) -> int:
    """Derive an independent stream label from a seed and a purpose tag."""
    h = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        for ch in tag.encode("utf-8"):
            h = _mix(np.atleast_1d(h ^ np.uint64(ch)))[0]
    return int(h)
