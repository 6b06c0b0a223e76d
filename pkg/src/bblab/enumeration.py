"""Streaming the machine space in a fixed, shardable order.

Order: rule count ``k`` ascending, then the from-index subset in lexicographic
order, then the to-index assignment as a mixed-radix number with the first
rule most significant.  Item ``i`` of that stream (0-based) belongs to shard
``i % total``; canonical streams keep the ordinals of the full stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import timedelta
from itertools import combinations, islice, product
from typing import Iterator

import numpy as np

from .machine import Machine, machine_space_size
from .symmetry import is_canonical, state_permutations


@dataclass(frozen=True)
class Shard:
    index: int = 0
    total: int = 1

    def __post_init__(self) -> None:
        if self.total < 1 or not 0 <= self.index < self.total:
            raise ValueError(f"invalid shard {self.index}/{self.total}")

    @classmethod
    def parse(cls, text: str) -> Shard:
        """Parse ``"i/m"``."""
        try:
            index, total = (int(part) for part in text.split("/"))
        except ValueError:
            raise ValueError(f"shard must look like i/m, got {text!r}") from None
        return cls(index, total)

    def __str__(self) -> str:
        return f"{self.index}/{self.total}"


WHOLE = Shard()


def _name_stream(n: int) -> Iterator[tuple[int, ...]]:
    nf, radix = 2 * n, 6 * n
    for k in range(1, nf + 1):
        for subset in combinations(range(nf), k):
            for digits in product(range(radix), repeat=k):
                name = [k] * (2 * k + 1)
                name[1::2] = subset
                name[2::2] = digits
                yield tuple(name)


def iter_name_tuples(n: int, shard: Shard = WHOLE) -> Iterator[tuple[int, ...]]:
    if n < 1:
        raise ValueError("n must be at least 1")
    return islice(_name_stream(n), shard.index, None, shard.total)


def enumerate_machines(n: int, shard: Shard = WHOLE) -> Iterator[Machine]:
    for name in iter_name_tuples(n, shard):
        yield Machine.from_pairs(zip(name[1::2], name[2::2]))


def enumerate_canonical(n: int, shard: Shard = WHOLE) -> Iterator[Machine]:
    """Orbit minima only, computed in the ``n``-state space.  Slow; see the compiled sweep."""
    for m in enumerate_machines(n, shard):
        if is_canonical(m, n):
            yield m


def count_stream(n: int, shard: Shard = WHOLE) -> int:
    count = 0
    for _ in iter_name_tuples(n, shard):
        count += 1
    return count


@dataclass(frozen=True)
class Block:
    k: int
    subset: tuple[int, ...]
    prefix: tuple[int, ...]
    ordinal: int
    size: int


def plan_blocks(n: int, max_block: int = 1 << 24) -> Iterator[Block]:
    """Cut the stream into contiguous blocks of at most ``max_block`` machines."""
    nf, radix = 2 * n, 6 * n
    ordinal = 0
    for k in range(1, nf + 1):
        fixed = 0
        while radix ** (k - fixed) > max_block:
            fixed += 1
        size = radix ** (k - fixed)
        for subset in combinations(range(nf), k):
            for prefix in product(range(radix), repeat=fixed):
                yield Block(k, subset, prefix, ordinal, size)
                ordinal += size
    assert ordinal == machine_space_size(n)


def group_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps for every (state permutation, mirror) pair, identity first.

    ``fsrc[g, f]`` is the from-index whose rule lands on ``f`` in the image;
    ``tmap[g, t]`` is the image of to-index ``t``.
    """
    perms = state_permutations(n)
    fsrc = np.zeros((2 * len(perms), 2 * n), np.int64)
    tmap = np.zeros((2 * len(perms), 6 * n), np.int64)
    g = 0
    for p in perms:
        inverse = [0] * n
        for q, image in enumerate(p):
            inverse[image] = q
        for flip in (False, True):
            for f in range(2 * n):
                fsrc[g, f] = 2 * inverse[f // 2] + f % 2
            for t in range(6 * n):
                move = t % 3
                tmap[g, t] = 6 * p[t // 6] + 3 * ((t % 6) // 3) + (2 - move if flip else move)
            g += 1
    return fsrc, tmap


def estimate_sweep(n: int, low_us: float, high_us: float) -> tuple[timedelta, timedelta]:
    """Wall time to simulate the whole ``n``-state space at the given per-machine costs."""
    if low_us <= 0 or high_us <= 0:
        raise ValueError("timings must be positive")
    count = machine_space_size(n)
    return timedelta(microseconds=count * low_us), timedelta(microseconds=count * high_us)


_UNITS = (
    ("years", 365 * 86400.0),
    ("days", 86400.0),
    ("hours", 3600.0),
    ("minutes", 60.0),
    ("seconds", 1.0),
    ("ms", 1e-3),
    ("µs", 1e-6),
)


def format_estimate(low: timedelta, high: timedelta) -> str:
    """``"58..135 days"``: lower bound to the nearest unit, upper bound rounded up."""
    low_s, high_s = low.total_seconds(), high.total_seconds()
    for unit, size in _UNITS:
        if high_s >= size:
            break
    return f"{round(low_s / size)}..{math.ceil(high_s / size - 1e-9)} {unit}"
