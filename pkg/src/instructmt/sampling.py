"""Deterministic, versioned sampling primitives.

Every piece of randomness in the toolkit flows through this module so that
outputs are reproducible across platforms and Python versions.  The
algorithm identifier below is recorded in manifests next to the seed.

`random.Random.randrange` on CPython draws via `getrandbits` from the
Mersenne Twister core, which is stable across versions; `random.sample`
and `random.shuffle` are avoided because their acceptance strategies are
implementation details that have changed before.
"""
from __future__ import annotations

import random
from typing import Sequence, TypeVar

T = TypeVar("T")

ALGORITHM_ID = "fisher-yates/mt19937/v1"


def sample_indices(n_items: int, k: int, seed: int) -> list[int]:
    """Draw k distinct indices from range(n_items) without replacement.

    A partial Fisher-Yates pass over an index array: position i swaps with
    a uniform position in [i, n_items), and the first k positions are the
    sample.  Order of the result is the draw order.
    """
    if k < 0:
        raise ValueError("sample size must be >= 0")
    if k > n_items:
        raise ValueError(f"cannot sample {k} from {n_items} items")
    rng = random.Random(seed)
    idx = list(range(n_items))
    for i in range(k):
        j = rng.randrange(i, n_items)
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k]


def sample(items: Sequence[T], k: int, seed: int) -> list[T]:
    return [items[i] for i in sample_indices(len(items), k, seed)]


def permutation(n_items: int, seed: int) -> list[int]:
    """Full deterministic permutation of range(n_items)."""
    return sample_indices(n_items, n_items, seed)
