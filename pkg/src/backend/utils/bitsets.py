"""Subset-as-integer helpers and numpy transforms over full subset tables."""

from functools import lru_cache
from typing import List, Sequence

import numpy as np


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> List[int]:
    """Positions of the set bits, ascending."""
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def submasks(x: int) -> List[int]:
    """All submasks of x in increasing order."""
    out = []
    sub = x
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & x
    return out[::-1]


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Bit counts of 0 .. 2^n - 1."""
    counts = np.zeros(1 << n, dtype=np.int16)
    for i in range(n):
        counts[1 << i: 2 << i] = counts[: 1 << i] + 1
    counts.setflags(write=False)
    return counts


def subset_indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _split(table: np.ndarray, i: int) -> np.ndarray:
    # axes: (high bits, bit i, low bits)
    return table.reshape(-1, 2, 1 << i)


def superset_or(table: np.ndarray, n: int) -> np.ndarray:
    """out[X] = any(table[Y] for Y subset of X)."""
    out = table.astype(bool).copy()
    for i in range(n):
        view = _split(out, i)
        view[:, 1, :] |= view[:, 0, :]
    return out


def subset_max(table: np.ndarray, n: int) -> np.ndarray:
    """out[X] = max(table[Y] for Y subset of X)."""
    out = table.copy()
    for i in range(n):
        view = _split(out, i)
        np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return out


def superset_min(table: np.ndarray, n: int) -> np.ndarray:
    """out[X] = min(table[Y] for Y superset of X)."""
    out = table.copy()
    for i in range(n):
        view = _split(out, i)
        np.minimum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
    return out


def embedding(positions: Sequence[int], n: int) -> np.ndarray:
    """For Y over len(positions) bits, the mask whose bit positions[j] is bit j of Y (n bits wide)."""
    k = len(positions)
    idx = subset_indices(k)
    out = np.zeros(1 << k, dtype=np.int64)
    for j, p in enumerate(positions):
        if p >= n:
            raise ValueError(f"position {p} outside {n} bits")
        out |= ((idx >> j) & 1) << p
    return out


def projection(source_positions: Sequence[int], n: int) -> np.ndarray:
    """For X over n bits, the compressed mask of X restricted to source_positions (bit j from position j)."""
    idx = subset_indices(n)
    out = np.zeros(1 << n, dtype=np.int64)
    for j, p in enumerate(source_positions):
        if p is None:
            continue
        out |= ((idx >> p) & 1) << j
    return out
