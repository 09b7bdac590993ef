"""Seeded instance generators shared across the test modules."""
from __future__ import annotations

import math

import numpy as np

from knapkit.model import BoundedInstance


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def rand_01(rng: np.random.Generator, n_max: int = 16, w_max: int = 30, p_max: int = 30):
    """Random 0-1 items plus a capacity somewhere inside the total weight."""
    n = int(rng.integers(1, n_max + 1))
    weights = rng.integers(1, w_max + 1, size=n)
    profits = rng.integers(1, p_max + 1, size=n)
    items = [(int(w), int(p)) for w, p in zip(weights, profits)]
    total = int(weights.sum())
    capacity = int(rng.integers(0, total + 1))
    return items, capacity


def _finish(rng: np.random.Generator, rows) -> BoundedInstance:
    total = sum(w * m for w, _, m in rows)
    capacity = int(rng.integers(0, total + 1))
    return BoundedInstance.from_rows(rows, capacity)


def bounded_uniform(rng, n_max=50, w_max=40, p_max=60, m_max=10) -> BoundedInstance:
    n = int(rng.integers(1, n_max + 1))
    rows = [
        (int(rng.integers(1, w_max + 1)), int(rng.integers(1, p_max + 1)), int(rng.integers(1, m_max + 1)))
        for _ in range(n)
    ]
    return _finish(rng, rows)


def bounded_correlated(rng, n_max=50, w_max=40, p_max=60, m_max=10) -> BoundedInstance:
    # profit tracks weight, so greedy ties abound and the difference phase matters
    n = int(rng.integers(1, n_max + 1))
    rows = []
    for _ in range(n):
        w = int(rng.integers(1, w_max + 1))
        p = min(p_max, max(1, w + int(rng.integers(-2, 3))))
        rows.append((w, p, int(rng.integers(1, m_max + 1))))
    return _finish(rng, rows)


def bounded_all_equal_weights(rng, n_max=50, w_max=40, p_max=60, m_max=10) -> BoundedInstance:
    n = int(rng.integers(1, n_max + 1))
    w = int(rng.integers(1, w_max + 1))
    rows = [(w, int(rng.integers(1, p_max + 1)), int(rng.integers(1, m_max + 1))) for _ in range(n)]
    return _finish(rng, rows)


def bounded_two_coprime_weights(rng, n_max=50, w_max=40, p_max=60, m_max=10) -> BoundedInstance:
    while True:
        a = int(rng.integers(2, w_max + 1))
        b = int(rng.integers(1, w_max + 1))
        if a != b and math.gcd(a, b) == 1:
            break
    n = int(rng.integers(1, n_max + 1))
    rows = [
        (a if rng.integers(0, 2) else b, int(rng.integers(1, p_max + 1)), int(rng.integers(1, m_max + 1)))
        for _ in range(n)
    ]
    return _finish(rng, rows)


def bounded_shared_factor_weights(rng, n_max=50, w_max=40, p_max=60, m_max=10) -> BoundedInstance:
    d = int(rng.integers(2, 5))
    n = int(rng.integers(1, n_max + 1))
    rows = [
        (d * int(rng.integers(1, w_max // d + 1)), int(rng.integers(1, p_max + 1)), int(rng.integers(1, m_max + 1)))
        for _ in range(n)
    ]
    return _finish(rng, rows)


def bounded_clustered_weights(rng, n_max=50, w_max=40, p_max=60, m_max=10, distinct=3) -> BoundedInstance:
    pool = rng.choice(np.arange(1, w_max + 1), size=min(distinct, w_max), replace=False)
    n = int(rng.integers(1, n_max + 1))
    rows = [
        (int(rng.choice(pool)), int(rng.integers(1, p_max + 1)), int(rng.integers(1, m_max + 1)))
        for _ in range(n)
    ]
    return _finish(rng, rows)


BOUNDED_FAMILIES = (
    bounded_uniform,
    bounded_correlated,
    bounded_all_equal_weights,
    bounded_two_coprime_weights,
    bounded_shared_factor_weights,
    bounded_clustered_weights,
)
