"""splitmix64 streams for reproducible map selection.

The k-th draw of the stream seeded with s is mix64(s + (k+1)*GOLDEN) mod 2^64,
so draws can be generated one at a time or as a whole vector; both paths must
agree bit-for-bit (the vector path backs the parameter scans).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_GOLDEN_U64 = np.uint64(GOLDEN)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64(z: int) -> int:
    """splitmix64 output function on a 64-bit state (Python ints)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_u64(seed: int, n: int) -> np.ndarray:
    """First n draws of the splitmix64 stream, as a uint64 vector."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    return _mix64_np(idx * _GOLDEN_U64 + np.uint64(seed & MASK64))


def choice_threshold(p: float) -> int:
    """Integer threshold t with draw < t exactly equivalent to draw/2^64 < p."""
    return int(p * 2.0**64)


def choice_stream(seed: int, n: int, p: float) -> np.ndarray:
    """Boolean selection vector: True where the first map is chosen.

    A step selects the first map iff draw/2^64 < p, evaluated exactly via an
    integer comparison (p * 2^64 is exactly representable for any float p).
    """
    if p >= 1.0:
        return np.ones(n, dtype=bool)
    if p <= 0.0:
        return np.zeros(n, dtype=bool)
    return stream_u64(seed, n) < np.uint64(choice_threshold(p))


def derive_cell_seed(base_seed: int, i: int, j: int) -> int:
    """Per-cell seed for grid scans: one splitmix64 draw from base ^ (i*2^32 + j).

    Depends only on (base_seed, i, j), so scan results are independent of the
    order in which cells are evaluated.
    """
    state = (int(base_seed) ^ ((int(i) << 32) + int(j))) & MASK64
    return mix64((state + GOLDEN) & MASK64)


def derive_cell_seeds(base_seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Vectorized derive_cell_seed; bit-identical to the scalar form."""
    state = np.uint64(base_seed & MASK64) ^ (
        (i.astype(np.uint64) << np.uint64(32)) + j.astype(np.uint64)
    )
    return _mix64_np(state + _GOLDEN_U64)
