"""Structural trimming of the add/remove pools down to near-linear size.

Within each direction, items are grouped into dyadic weight batches [w, 2w)
and streamed in preference order. For each dyadic cap level r, weights that
accumulate 2r+2 copies either join a base set or, once enough bases exist
and the weight passes a divisibility test against tracked prime powers, get
capped: beyond the trigger copies, at most floor(w^2/(k*w_i)) further copies
of that weight can matter, because any heavier tail could be swapped for an
equal-weight nonnegative combination of earlier (more preferable) base
copies. The per-weight keep count is the minimum cap over all levels.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional, Sequence

import numpy as np

from .model import DiffInstance


def spf_sieve(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..limit; spf[1] = 1 marks the unit."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p : limit + 1 : p] = np.where(spf[p : limit + 1 : p] == 0, p, spf[p : limit + 1 : p])
    return spf


def factorize(x: int, spf: np.ndarray) -> list[tuple[int, int]]:
    """Exact factorization of x via repeated smallest-prime lookups."""
    if not (1 <= x < len(spf)):
        raise ValueError(f"{x} outside sieve range")
    out: list[tuple[int, int]] = []
    while x > 1:
        p = int(spf[x])
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        out.append((p, e))
    return out


def frobenius_bound(bases: Sequence[int], d: Optional[int] = None) -> int:
    """Threshold above which every d-multiple is a nonnegative combination.

    For bases v1 > ... > vk (k >= 2) with gcd d, returns
    2*floor(v1/(d*k))*v2 - v1.
    """
    k = len(bases)
    if k < 2:
        raise ValueError("need at least two bases")
    vs = list(bases)
    if any(vs[i] <= vs[i + 1] for i in range(k - 1)) or vs[-1] < 1:
        raise ValueError("bases must be strictly decreasing positive integers")
    if d is None:
        d = math.gcd(*vs)
    return 2 * (vs[0] // (d * k)) * vs[1] - vs[0]


@dataclass(eq=False)
class LevelReport:
    """Outcome of one (direction, batch, level) pass."""

    direction: str
    batch_low: int
    level: int
    k: int
    bases: tuple[int, ...]
    tracked: dict[int, int]          # prime -> final exponent bound
    tracked_initial: dict[int, int]  # prime -> bound when tracking started
    caps: dict[int, int]             # weight -> copies kept at this level


@dataclass(eq=False)
class ReductionReport:
    """Per-level outcomes plus global kept counts."""

    levels: list[LevelReport] = field(default_factory=list)
    final_caps: dict[str, dict[int, int]] = field(default_factory=dict)
    input_items: int = 0
    kept_items: int = 0
    elapsed_s: float = 0.0

    def to_lines(self) -> list[str]:
        lines = [f"reduction kept {self.kept_items} of {self.input_items} items in {self.elapsed_s:.3f}s"]
        for lv in self.levels:
            if not lv.bases and not lv.caps:
                continue
            tracked = ",".join(f"{p}^{q}" for p, q in sorted(lv.tracked.items())) or "-"
            lines.append(
                f"dir={lv.direction} batch={lv.batch_low} r={lv.level} k={lv.k} "
                f"bases={len(lv.bases)} tracked={tracked} capped={len(lv.caps)}"
            )
        return lines


def _direction_cmp(increasing: bool):
    def cmp(a: tuple[int, int, int], b: tuple[int, int, int]) -> int:
        # entries are (weight, profit, position); exact cross-multiplication
        lhs = a[1] * b[0]
        rhs = b[1] * a[0]
        if lhs != rhs:
            better = lhs < rhs if increasing else lhs > rhs
            return -1 if better else 1
        if a[0] != b[0]:
            return -1 if a[0] < b[0] else 1
        return a[2] - b[2]

    return cmp


def _init_tracked(bases: list[int], k: int, factors: dict[int, dict[int, int]]) -> dict[int, int]:
    """Per-prime exponent bounds over all gcds of base subsets missing k elements.

    A prime is tracked with the (k+1)-th smallest exponent among the bases:
    any subset that drops k bases still contains one of the k+1 smallest.
    """
    primes: set[int] = set()
    for w in bases:
        primes.update(factors[w])
    tracked: dict[int, int] = {}
    for p in primes:
        exps = sorted(factors[w].get(p, 0) for w in bases)
        q = exps[k] if k < len(exps) else 0
        if q > 0:
            tracked[p] = q
    return tracked


def reduce_direction(
    groups: Sequence[tuple[int, int, int]],
    w_max: int,
    safety: float,
    *,
    increasing: bool,
    spf: Optional[np.ndarray] = None,
    direction: str = "+",
) -> tuple[list[int], list[LevelReport]]:
    """Kept copy count per (weight, profit, count) group of one direction.

    Groups are streamed in preference order: decreasing profit/weight for
    additions, increasing for removals. Weights never capped at any level
    keep all copies.
    """
    if spf is None:
        spf = spf_sieve(max(w_max, 1))
    keyed = [(groups[i][0], groups[i][1], i) for i in range(len(groups))]
    keyed.sort(key=cmp_to_key(_direction_cmp(increasing)))
    order = [k[2] for k in keyed]

    top = max(w_max, 1).bit_length() - 1
    if (1 << top) < w_max:
        top += 1
    levels = [1 << l for l in range(top + 1)]

    batches: dict[int, list[int]] = {}
    weight_totals: dict[int, int] = {}
    for gi in order:
        w, _, c = groups[gi]
        b = w.bit_length() - 1
        batches.setdefault(b, []).append(gi)
        weight_totals[w] = weight_totals.get(w, 0) + c

    factor_cache: dict[int, dict[int, int]] = {}

    def factors_of(w: int) -> dict[int, int]:
        f = factor_cache.get(w)
        if f is None:
            f = dict(factorize(w, spf))
            factor_cache[w] = f
        return f

    reports: list[LevelReport] = []
    final_cap: dict[int, int] = {}

    for b in sorted(batches):
        members = batches[b]
        w_low = 1 << b
        for r in levels:
            k = math.ceil(safety * w_max / r)
            need_bases = 9 * k
            trigger = 2 * r + 2
            counters: dict[int, int] = {}
            bases: list[int] = []
            tracked: dict[int, int] = {}
            tracked_initial: dict[int, int] = {}
            pending: dict[int, list[int]] = {}
            caps: dict[int, int] = {}
            tracking = False
            for gi in members:
                w, _, c = groups[gi]
                if weight_totals[w] < trigger:
                    continue
                seen = counters.get(w, 0)
                now = seen + c
                counters[w] = now
                if not (seen < trigger <= now):
                    continue
                if not tracking:
                    bases.append(w)
                    if len(bases) == need_bases:
                        for base in bases:
                            factors_of(base)
                        tracked = _init_tracked(bases, k, factor_cache)
                        tracked_initial = dict(tracked)
                        pending = {p: [] for p in tracked}
                        tracking = True
                    continue
                if all(w % p**q == 0 for p, q in tracked.items() if q > 0):
                    # capped: the trigger copies plus the tail that a base
                    # combination cannot replace
                    caps[w] = trigger + (w_low * w_low) // (k * w)
                else:
                    bases.append(w)
                    exps = factors_of(w)
                    for p in list(tracked):
                        q = tracked[p]
                        if q > 0 and exps.get(p, 0) < q:
                            lst = pending[p]
                            lst.append(w)
                            if len(lst) == k + 1:
                                tracked[p] = max(factors_of(x).get(p, 0) for x in lst)
                                pending[p] = []
            reports.append(
                LevelReport(direction, w_low, r, k, tuple(bases), dict(tracked), tracked_initial, caps)
            )
            for w, cap in caps.items():
                if cap < final_cap.get(w, cap + 1):
                    final_cap[w] = cap

    kept = [0] * len(groups)
    budget_left = dict(final_cap)
    for gi in order:
        w, _, c = groups[gi]
        if w in budget_left:
            take = min(c, budget_left[w])
            budget_left[w] -= take
        else:
            take = c
        kept[gi] = take
    return kept, reports


def reduce_items(diff: DiffInstance, w_max: int, safety: float = 2.0) -> tuple[DiffInstance, ReductionReport]:
    """Apply the per-direction reduction to a difference instance.

    Both directions are processed independently; the surviving groups keep
    their original order and provenance.
    """
    t0 = time.perf_counter()
    spf = spf_sieve(max(w_max, 1))
    pos_idx = [i for i, it in enumerate(diff.items) if it.weight > 0]
    neg_idx = [i for i, it in enumerate(diff.items) if it.weight < 0]
    report = ReductionReport(input_items=diff.total_copies)

    kept_all = [0] * len(diff.items)
    for direction, idxs, increasing in (("+", pos_idx, False), ("-", neg_idx, True)):
        groups = [
            (abs(diff.items[i].weight), abs(diff.items[i].profit), diff.counts[i]) for i in idxs
        ]
        if not groups:
            continue
        kept, level_reports = reduce_direction(
            groups, w_max, safety, increasing=increasing, spf=spf, direction=direction
        )
        report.levels.extend(level_reports)
        caps: dict[int, int] = {}
        for lv in level_reports:
            for w, cap in lv.caps.items():
                caps[w] = min(caps.get(w, cap), cap)
        report.final_caps[direction] = caps
        for i, c in zip(idxs, kept):
            kept_all[i] = c

    items = []
    counts = []
    sources = []
    for i, c in enumerate(kept_all):
        if c > 0:
            items.append(diff.items[i])
            counts.append(c)
            sources.append(diff.sources[i])
    reduced = DiffInstance(tuple(items), diff.residual_budget, tuple(counts), tuple(sources))
    report.kept_items = reduced.total_copies
    report.elapsed_s = time.perf_counter() - t0
    return reduced, report
