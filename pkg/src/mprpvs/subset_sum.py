"""Exact optimization subset-sum via a reachability bitset.

Python integers serve as bitsets over ``[0, Q]``: bit ``s`` of
``reach[i]`` is set when some subset of ``values[i:]`` sums to ``s``.
Building the suffix table lets the witness be reconstructed greedily from
the front, which yields the lexicographically smallest optimal index set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_SCALE = 1000


@dataclass(frozen=True)
class SubsetSumResult:
    chosen: tuple[int, ...]
    total: int


def best_subset(values: Sequence[int], Q: int) -> SubsetSumResult:
    """Largest subset total not exceeding ``Q``, with one witness.

    >>> best_subset([3, 5, 7], 10)
    SubsetSumResult(chosen=(0, 2), total=10)
    """
    if Q < 0:
        raise ValueError(f"capacity must be nonnegative, got {Q}")
    for v in values:
        if int(v) != v or v <= 0:
            raise ValueError(f"values must be positive integers, got {v!r}")
    values = [int(v) for v in values]
    if not values:
        return SubsetSumResult((), 0)

    mask = (1 << (Q + 1)) - 1
    n = len(values)
    reach = [0] * (n + 1)
    reach[n] = 1
    for i in range(n - 1, -1, -1):
        reach[i] = (reach[i + 1] | (reach[i + 1] << values[i])) & mask

    total = reach[0].bit_length() - 1
    chosen = []
    remaining = total
    for i, v in enumerate(values):
        if remaining == 0:
            break
        if v <= remaining and (reach[i + 1] >> (remaining - v)) & 1:
            chosen.append(i)
            remaining -= v
    return SubsetSumResult(tuple(chosen), total)


def scale_down(q: float, scale: int = DEFAULT_SCALE) -> int:
    """Fixed-point integer for a real quantity, rounded toward zero."""
    return int(math.floor(q * scale + 1e-9))


def scale_up(q: float, scale: int = DEFAULT_SCALE) -> int:
    """Fixed-point integer rounded away from zero; safe for capacity checks."""
    return int(math.ceil(q * scale - 1e-9))
