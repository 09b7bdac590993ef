"""Greedy maximal-prefix solution and the reduction to the difference problem."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import (
    BoundedInstance,
    DiffInstance,
    SignedItem,
    Solution,
    efficiency_order,
)


@dataclass(frozen=True)
class GreedyPrefix:
    """Maximal prefix of the efficiency-ordered copy sequence.

    counts[t] is the number of copies of type t taken; the prefix stops at
    the first copy that does not fit. If every copy fits, split is None and
    the residual may be w_max or larger; otherwise 0 <= residual < w_max.
    """

    order: tuple[int, ...]
    counts: tuple[int, ...]
    profit: int
    weight: int
    residual: int
    split: Optional[tuple[int, int]]  # (type index, copies taken of it) at the stop

    @property
    def complete(self) -> bool:
        return self.split is None


def greedy_prefix(instance: BoundedInstance, order: Optional[Sequence[int]] = None) -> GreedyPrefix:
    """Take copies in efficiency order until the first one that does not fit.

    Count-based: a whole type is consumed with one division, so no copy
    expansion happens even for huge multiplicities.
    """
    if order is None:
        order = efficiency_order(instance)
    counts = [0] * instance.n
    remaining = instance.capacity
    profit = 0
    split: Optional[tuple[int, int]] = None
    for t in order:
        it = instance.items[t]
        take = min(it.multiplicity, remaining // it.weight)
        counts[t] = take
        remaining -= take * it.weight
        profit += take * it.profit
        if take < it.multiplicity:
            split = (t, take)
            break
    return GreedyPrefix(
        tuple(order), tuple(counts), profit, instance.capacity - remaining, remaining, split
    )


def build_diff_instance(instance: BoundedInstance, prefix: GreedyPrefix) -> DiffInstance:
    """Encode untaken copies as additions and taken copies as removals.

    Entries keep per-type counts and record the source type index, so the
    total copy count is preserved: |I+| + |I-| = sum of multiplicities.
    """
    items: list[SignedItem] = []
    counts: list[int] = []
    sources: list[int] = []
    for t in prefix.order:
        it = instance.items[t]
        untaken = it.multiplicity - prefix.counts[t]
        if untaken > 0:
            items.append(SignedItem(it.weight, it.profit))
            counts.append(untaken)
            sources.append(t)
    for t in prefix.order:
        it = instance.items[t]
        taken = prefix.counts[t]
        if taken > 0:
            items.append(SignedItem(-it.weight, -it.profit))
            counts.append(taken)
            sources.append(t)
    return DiffInstance(tuple(items), prefix.residual, tuple(counts), tuple(sources))


def recombine(
    instance: BoundedInstance,
    prefix: GreedyPrefix,
    diff: DiffInstance,
    diff_solution: Solution,
) -> Solution:
    """Merge the greedy prefix with a difference-problem solution.

    Witness counts are the greedy counts plus additions minus removals; a
    merge that breaks multiplicities or the capacity indicates a solver bug.
    """
    profit = prefix.profit + diff_solution.profit
    witness = None
    if diff_solution.witness is not None:
        counts = list(prefix.counts)
        for idx, c in diff_solution.witness:
            item = diff.items[idx]
            src = diff.sources[idx]
            if src < 0:
                raise RuntimeError("difference witness lacks source provenance")
            counts[src] += c if item.weight > 0 else -c
        weight = 0
        total = 0
        for t, c in enumerate(counts):
            it = instance.items[t]
            if c < 0 or c > it.multiplicity:
                raise RuntimeError(f"merged witness count {c} out of range for type {t}")
            weight += it.weight * c
            total += it.profit * c
        if weight > instance.capacity:
            raise RuntimeError(f"merged witness weight {weight} exceeds capacity {instance.capacity}")
        if total != profit:
            raise RuntimeError(f"merged witness profit {total} != reported {profit}")
        witness = tuple((t, c) for t, c in enumerate(counts) if c > 0)
    meta = dict(diff_solution.meta)
    meta["greedy_profit"] = prefix.profit
    meta["residual_budget"] = prefix.residual
    return Solution(profit, witness, meta)
