"""Exact reference solvers: oracles for testing and fallbacks for small inputs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import BoundedInstance, DiffInstance

BOTTOM = -(2**62)  # "unreachable" sentinel; far below any achievable profit
DEFAULT_CELL_GUARD = 200_000_000
BRUTE_ITEM_GUARD = 24


class GuardExceeded(Exception):
    """Input too large for the requested exact method; pick another solver."""


@dataclass(eq=False)
class DpRow:
    """Dense slab of profits: values[j - offset] is the profit at weight j."""

    offset: int
    values: np.ndarray

    def get(self, j: int, default: int) -> int:
        k = j - self.offset
        if 0 <= k < len(self.values):
            return int(self.values[k])
        return default


def _check_items(items: Sequence[Sequence[int]]) -> None:
    for w, p in items:
        if w < 1 or p < 1:
            raise ValueError(f"weights and profits must be >= 1, got ({w}, {p})")


def bellman_01(
    items: Sequence[Sequence[int]],
    capacity: int,
    *,
    max_cells: int = DEFAULT_CELL_GUARD,
) -> int:
    """Classic O(n*W) table, rolled into one row of size W+1."""
    _check_items(items)
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    n = len(items)
    if n == 0 or capacity == 0:
        return 0
    if n * (capacity + 1) > max_cells:
        raise GuardExceeded(f"bellman_01 table needs {n * (capacity + 1)} cells > {max_cells}")
    f = np.zeros(capacity + 1, dtype=np.int64)
    for w, p in items:
        if w <= capacity:
            np.maximum(f[w:], f[: capacity + 1 - w] + p, out=f[w:])
    return int(f[capacity])


def bellman_01_with_witness(
    items: Sequence[Sequence[int]],
    capacity: int,
    *,
    max_cells: int = DEFAULT_CELL_GUARD,
) -> tuple[int, tuple[int, ...]]:
    """bellman_01 with all rows retained, backtracking one maximizing subset."""
    _check_items(items)
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    n = len(items)
    if n * (capacity + 1) > max_cells:
        raise GuardExceeded(f"bellman_01 witness table needs {n * (capacity + 1)} cells > {max_cells}")
    rows = [np.zeros(capacity + 1, dtype=np.int64)]
    for w, p in items:
        f = rows[-1].copy()
        if w <= capacity:
            np.maximum(f[w:], rows[-1][: capacity + 1 - w] + p, out=f[w:])
        rows.append(f)
    profit = int(rows[n][capacity])
    taken: list[int] = []
    j = capacity
    for i in range(n, 0, -1):
        if rows[i][j] != rows[i - 1][j]:
            taken.append(i - 1)
            j -= items[i - 1][0]
    taken.reverse()
    return profit, tuple(taken)


def decompose_multiplicity(m: int) -> list[int]:
    """Power-of-two bundle sizes summing to m (1, 2, 4, ..., remainder)."""
    bundles = []
    take = 1
    while m > 0:
        c = min(take, m)
        bundles.append(c)
        m -= c
        take *= 2
    return bundles


def bounded_to_01(instance: BoundedInstance) -> list[tuple[int, int, int, int]]:
    """Binary-decomposed 0-1 items as (weight, profit, type index, copies)."""
    out = []
    for t, it in enumerate(instance.items):
        for c in decompose_multiplicity(it.multiplicity):
            out.append((it.weight * c, it.profit * c, t, c))
    return out


def bellman_bounded(
    instance: BoundedInstance,
    *,
    max_cells: int = DEFAULT_CELL_GUARD,
) -> int:
    """Exact bounded optimum via binary decomposition of multiplicities."""
    bundles = bounded_to_01(instance)
    return bellman_01([(w, p) for w, p, _, _ in bundles], instance.capacity, max_cells=max_cells)


def bellman_bounded_with_witness(
    instance: BoundedInstance,
    *,
    max_cells: int = DEFAULT_CELL_GUARD,
) -> tuple[int, tuple[tuple[int, int], ...]]:
    """bellman_bounded plus a witness as (type index, count) pairs."""
    bundles = bounded_to_01(instance)
    profit, picked = bellman_01_with_witness(
        [(w, p) for w, p, _, _ in bundles], instance.capacity, max_cells=max_cells
    )
    counts: dict[int, int] = {}
    for b in picked:
        _, _, t, c = bundles[b]
        counts[t] = counts.get(t, 0) + c
    witness = tuple(sorted(counts.items()))
    return profit, witness


def brute_force_01(
    items: Sequence[Sequence[int]],
    capacity: int,
    *,
    max_items: int = BRUTE_ITEM_GUARD,
) -> tuple[int, tuple[int, ...]]:
    """Full subset enumeration; returns the lexicographically smallest witness.

    Hard-limited to max_items because the mask arrays double per item.
    """
    _check_items(items)
    n = len(items)
    if n > max_items:
        raise GuardExceeded(f"brute force limited to {max_items} items, got {n}")
    if n == 0:
        return 0, ()
    wts = np.zeros(1, dtype=np.int64)
    prf = np.zeros(1, dtype=np.int64)
    for w, p in items:
        wts = np.concatenate([wts, wts + w])
        prf = np.concatenate([prf, prf + p])
    feasible = wts <= capacity
    if not feasible.any():
        return 0, ()
    best = int(prf[feasible].max())
    ties = np.flatnonzero(feasible & (prf == best))
    def index_set(mask: int) -> tuple[int, ...]:
        return tuple(i for i in range(n) if mask >> i & 1)
    witness = min((index_set(int(m)) for m in ties))
    return best, witness


def diff_exact(
    diff: DiffInstance,
    *,
    max_cells: int = DEFAULT_CELL_GUARD,
) -> int:
    """Exact difference-problem optimum by dense DP over the signed weight range.

    Maximizes the profit of a sub-multiset whose signed weight stays within
    the residual budget; the empty set keeps the answer >= 0.
    """
    weights: list[int] = []
    profits: list[int] = []
    for it, c in zip(diff.items, diff.counts):
        if it.weight == 0:
            raise ValueError("signed items must have nonzero weight")
        weights.extend([it.weight] * c)
        profits.extend([it.profit] * c)
    if not weights:
        return 0
    neg_span = -sum(w for w in weights if w < 0)
    pos_span = sum(w for w in weights if w > 0)
    span = neg_span + pos_span + 1
    if span * len(weights) > max_cells:
        raise GuardExceeded(f"diff_exact needs {span * len(weights)} cells > {max_cells}")
    f = np.full(span, BOTTOM, dtype=np.int64)
    f[neg_span] = 0  # weight zero: the empty selection
    for w, p in zip(weights, profits):
        if w > 0:
            np.maximum(f[w:], f[: span - w] + p, out=f[w:])
        else:
            np.maximum(f[:w], f[-w:] + p, out=f[:w])
    hi = neg_span + min(diff.residual_budget, pos_span)
    if hi < 0:
        return 0
    return int(max(0, int(f[: hi + 1].max())))
