"""Domain types, validation, and the efficiency ordering shared by every solver."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence

I64_MAX = 2**63 - 1
CROSS_MULT_LIMIT = 2**31  # weights/profits above this would void exact 64-bit cross-multiplication


@dataclass(frozen=True)
class ItemType:
    """One item kind: positive weight and profit, plus available copy count."""

    weight: int
    profit: int
    multiplicity: int = 1


@dataclass(frozen=True)
class BoundedInstance:
    """Bounded knapsack input: a sequence of item types and a weight capacity."""

    items: tuple[ItemType, ...]
    capacity: int

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], capacity: int) -> "BoundedInstance":
        """Build from (weight, profit) or (weight, profit, multiplicity) rows."""
        return cls(tuple(ItemType(*row) for row in rows), capacity)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def w_max(self) -> int:
        return max((it.weight for it in self.items), default=0)

    @property
    def p_max(self) -> int:
        return max((it.profit for it in self.items), default=0)

    @property
    def total_copies(self) -> int:
        return sum(it.multiplicity for it in self.items)

    @property
    def total_weight(self) -> int:
        return sum(it.weight * it.multiplicity for it in self.items)

    @property
    def total_profit(self) -> int:
        return sum(it.profit * it.multiplicity for it in self.items)


@dataclass(frozen=True)
class SignedItem:
    """Item of the difference problem; sign marks add (+) versus remove (-)."""

    weight: int
    profit: int


@dataclass(frozen=True)
class DiffInstance:
    """Add/remove item pool under a residual budget.

    Multiplicities stay compact: ``counts[i]`` copies of ``items[i]``.
    ``sources[i]`` is the originating type index (-1 when unknown) so
    witnesses can be mapped back to the original instance.
    """

    items: tuple[SignedItem, ...]
    residual_budget: int
    counts: tuple[int, ...] = ()
    sources: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.counts:
            object.__setattr__(self, "counts", (1,) * len(self.items))
        if not self.sources:
            object.__setattr__(self, "sources", (-1,) * len(self.items))

    @property
    def total_copies(self) -> int:
        return sum(self.counts)

    @property
    def w_max(self) -> int:
        return max((abs(it.weight) for it in self.items), default=0)


def diff_from_lists(
    positives: Iterable[Sequence[int]],
    negatives: Iterable[Sequence[int]],
    residual_budget: int,
) -> DiffInstance:
    """Convenience builder: rows are (w, p) or (w, p, count) with magnitudes."""
    items: list[SignedItem] = []
    counts: list[int] = []
    for row in positives:
        items.append(SignedItem(row[0], row[1]))
        counts.append(row[2] if len(row) > 2 else 1)
    for row in negatives:
        items.append(SignedItem(-abs(row[0]), -abs(row[1])))
        counts.append(row[2] if len(row) > 2 else 1)
    return DiffInstance(tuple(items), residual_budget, tuple(counts))


@dataclass
class Solution:
    """Solver output: optimal profit, optional witness, and run metadata.

    The witness is a multiset encoded as (type index, count) pairs.
    """

    profit: int
    witness: Optional[tuple[tuple[int, int], ...]] = None
    meta: dict = field(default_factory=dict)


def validate(instance: BoundedInstance) -> list[str]:
    """Check instance invariants; empty list means the instance is usable.

    Violations are data, not errors: each entry names the offending item.
    """
    problems: list[str] = []
    if instance.capacity < 0:
        problems.append("capacity must be >= 0")
    copies = weight_sum = profit_sum = 0
    for i, it in enumerate(instance.items):
        if it.weight < 1:
            problems.append(f"item {i}: weight >= 1 violated (got {it.weight})")
        if it.profit < 1:
            problems.append(f"item {i}: profit >= 1 violated (got {it.profit})")
        if it.multiplicity < 1:
            problems.append(f"item {i}: multiplicity >= 1 violated (got {it.multiplicity})")
        if it.weight > CROSS_MULT_LIMIT:
            problems.append(f"item {i}: weight exceeds 2^31")
        if it.profit > CROSS_MULT_LIMIT:
            problems.append(f"item {i}: profit exceeds 2^31")
        copies += max(it.multiplicity, 0)
        weight_sum += max(it.weight, 0) * max(it.multiplicity, 0)
        profit_sum += max(it.profit, 0) * max(it.multiplicity, 0)
    if copies > I64_MAX:
        problems.append("total copy count overflows 64-bit accumulation")
    if weight_sum > I64_MAX:
        problems.append("total weight overflows 64-bit accumulation")
    if profit_sum > I64_MAX:
        problems.append("total profit overflows 64-bit accumulation")
    return problems


def _efficiency_cmp(a: tuple[int, int, int], b: tuple[int, int, int]) -> int:
    # entries are (weight, profit, index); exact cross-multiplication, no floats
    lhs = a[1] * b[0]
    rhs = b[1] * a[0]
    if lhs != rhs:
        return -1 if lhs > rhs else 1
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    return a[2] - b[2]


def efficiency_order(instance: BoundedInstance) -> list[int]:
    """Type indices sorted by profit/weight descending.

    Ties break toward the smaller weight, then the smaller original index,
    so the ordering is total and repeated calls agree exactly.
    """
    keyed = [(it.weight, it.profit, i) for i, it in enumerate(instance.items)]
    keyed.sort(key=cmp_to_key(_efficiency_cmp))
    return [k[2] for k in keyed]


def witness_violations(instance: BoundedInstance, solution: Solution) -> list[str]:
    """Check a witness against capacity, multiplicities, and the claimed profit."""
    if solution.witness is None:
        return []
    problems: list[str] = []
    weight = profit = 0
    for idx, count in solution.witness:
        if not (0 <= idx < instance.n):
            problems.append(f"witness refers to unknown type {idx}")
            continue
        it = instance.items[idx]
        if count < 0 or count > it.multiplicity:
            problems.append(f"witness count {count} outside [0, {it.multiplicity}] for type {idx}")
        weight += it.weight * count
        profit += it.profit * count
    if weight > instance.capacity:
        problems.append(f"witness weight {weight} exceeds capacity {instance.capacity}")
    if profit != solution.profit:
        problems.append(f"witness profit {profit} != reported {solution.profit}")
    return problems
