"""Counter-based per-path uniforms built on the SplitMix64 finaliser.

Path ``i`` of a run with seed ``s`` draws its ``j``-th uniform as::

    key    = mix64(s)
    base_i = mix64(key ^ mix64(i + 1))
    u_ij   = ((mix64(base_i + (j + 1) * GAMMA) >> 11) + 0.5) * 2**-53

so every draw is a pure function of ``(seed, i, j)`` and lies in (0, 1).
"""
from __future__ import annotations

import numpy as np

ALGORITHM = "splitmix64-counter: key=mix64(seed); base_i=mix64(key^mix64(i+1)); u_ij=((mix64(base_i+(j+1)*0x9E3779B97F4A7C15)>>11)+0.5)*2^-53"

GAMMA = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
ONE = np.uint64(1)
INV53 = 2.0**-53


def mix64(z):
    """SplitMix64 output function on uint64 scalars or arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = np.asarray(z, dtype=np.uint64)
        z = (z ^ (z >> S30)) * M1
        z = (z ^ (z >> S27)) * M2
        return z ^ (z >> S31)


def stream_key(seed: int) -> np.uint64:
    return np.uint64(mix64(np.uint64(seed)))


def path_bases(key: np.uint64, index: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return mix64(key ^ mix64(np.asarray(index, dtype=np.uint64) + ONE))


def uniforms(base: np.ndarray, counter: np.ndarray) -> np.ndarray:
    """``u`` for each ``(base, counter)`` pair."""
    with np.errstate(over="ignore"):
        x = mix64(base + (np.asarray(counter, dtype=np.uint64) + ONE) * GAMMA)
    return ((x >> S11).astype(np.float64) + 0.5) * INV53
