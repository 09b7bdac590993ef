"""End-to-end solvers with automatic fallback to the exact table on small inputs."""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Sequence

from . import baselines
from .baselines import GuardExceeded
from .model import BoundedInstance, ItemType, Solution, validate
from .permdp import permdp_solve
from .proximity import build_diff_instance, greedy_prefix, recombine
from .reduction import reduce_items

_M64 = (1 << 64) - 1

# salts for per-phase seed derivation
SEED_PERMDP = 1
SEED_DIFF = 2
SEED_TRIAL = 3


def mix_seed(master: int, salt: int) -> int:
    """SplitMix64 step: independent, reproducible per-phase seeds."""
    x = (master + salt * 0x9E3779B97F4A7C15) & _M64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _M64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _M64
    x ^= x >> 31
    return x


@dataclass
class SolverConfig:
    """Knobs shared by the top-level solvers.

    algorithm: auto | bellman | permdp | pipeline | brute
    """

    algorithm: str = "auto"
    alpha: float = 4.0
    safety: float = 2.0
    seed: int = 0
    witness: bool = False
    bellman_cells: int = 10_000_000   # auto mode switches off the exact table past this
    oracle_cells: int = baselines.DEFAULT_CELL_GUARD
    brute_items: int = baselines.BRUTE_ITEM_GUARD
    expand_copies: int = 200_000      # cap when a 0-1 algorithm needs expanded copies

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.safety < 1:
            raise ValueError("safety must be >= 1")


def _as_instance(items: Sequence, capacity: int) -> BoundedInstance:
    rows = []
    for it in items:
        if isinstance(it, ItemType):
            rows.append((it.weight, it.profit, it.multiplicity))
        else:
            rows.append((it[0], it[1], 1))
    return BoundedInstance.from_rows(rows, capacity)


def _require_valid(instance: BoundedInstance) -> None:
    problems = validate(instance)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))


def solve_01(items: Sequence, capacity: int, config: SolverConfig | None = None) -> Solution:
    """Solve 0-1 knapsack; auto mode uses the exact table while it is cheap."""
    config = config or SolverConfig()
    instance = _as_instance(items, capacity)
    _require_valid(instance)
    pairs = [(it.weight, it.profit) for it in instance.items]
    algo = config.algorithm
    if algo == "auto":
        algo = "bellman" if instance.n * capacity <= config.bellman_cells else "permdp"
    if algo == "pipeline":
        return solve_bounded(instance, replace(config, algorithm="pipeline"))
    t0 = time.perf_counter()
    if algo == "bellman":
        if config.witness:
            profit, picked = baselines.bellman_01_with_witness(
                pairs, capacity, max_cells=config.oracle_cells
            )
            witness = tuple((i, 1) for i in picked)
        else:
            profit = baselines.bellman_01(pairs, capacity, max_cells=config.oracle_cells)
            witness = None
        return Solution(profit, witness, {
            "algorithm": "bellman", "seed": config.seed,
            "elapsed_s": time.perf_counter() - t0,
        })
    if algo == "brute":
        profit, picked = baselines.brute_force_01(pairs, capacity, max_items=config.brute_items)
        witness = tuple((i, 1) for i in picked) if config.witness else None
        return Solution(profit, witness, {
            "algorithm": "brute", "seed": config.seed,
            "elapsed_s": time.perf_counter() - t0,
        })
    if algo == "permdp":
        return permdp_solve(
            pairs, capacity,
            alpha=config.alpha,
            seed=mix_seed(config.seed, SEED_PERMDP),
            want_witness=config.witness,
        )
    raise ValueError(f"unknown algorithm {config.algorithm!r}")


def solve_bounded(instance: BoundedInstance, config: SolverConfig | None = None) -> Solution:
    """Solve bounded knapsack; the pipeline path is greedy + reduce + windowed DP."""
    config = config or SolverConfig()
    _require_valid(instance)
    algo = config.algorithm
    decomposed = sum(it.multiplicity.bit_length() for it in instance.items)
    if algo == "auto":
        algo = "bellman" if decomposed * instance.capacity <= config.bellman_cells else "pipeline"
    t0 = time.perf_counter()
    if algo == "bellman":
        if config.witness:
            profit, witness = baselines.bellman_bounded_with_witness(
                instance, max_cells=config.oracle_cells
            )
        else:
            profit = baselines.bellman_bounded(instance, max_cells=config.oracle_cells)
            witness = None
        return Solution(profit, witness, {
            "algorithm": "bellman", "seed": config.seed,
            "elapsed_s": time.perf_counter() - t0,
        })
    if algo == "brute":
        if instance.total_copies > config.brute_items:
            raise GuardExceeded(
                f"brute force limited to {config.brute_items} copies, got {instance.total_copies}"
            )
        pairs = []
        owner = []
        for t, it in enumerate(instance.items):
            for _ in range(it.multiplicity):
                pairs.append((it.weight, it.profit))
                owner.append(t)
        profit, picked = baselines.brute_force_01(pairs, instance.capacity)
        witness = None
        if config.witness:
            counts: dict[int, int] = {}
            for i in picked:
                counts[owner[i]] = counts.get(owner[i], 0) + 1
            witness = tuple(sorted(counts.items()))
        return Solution(profit, witness, {
            "algorithm": "brute", "seed": config.seed,
            "elapsed_s": time.perf_counter() - t0,
        })
    if algo == "permdp":
        if instance.total_copies > config.expand_copies:
            raise GuardExceeded(
                f"plain permdp would expand {instance.total_copies} copies > {config.expand_copies}"
            )
        pairs = []
        owner = []
        for t, it in enumerate(instance.items):
            for _ in range(it.multiplicity):
                pairs.append((it.weight, it.profit))
                owner.append(t)
        sol = permdp_solve(
            pairs, instance.capacity,
            alpha=config.alpha,
            seed=mix_seed(config.seed, SEED_PERMDP),
            want_witness=config.witness,
        )
        if sol.witness is not None:
            counts = {}
            for i, c in sol.witness:
                counts[owner[i]] = counts.get(owner[i], 0) + c
            sol.witness = tuple(sorted(counts.items()))
        return sol
    if algo != "pipeline":
        raise ValueError(f"unknown algorithm {config.algorithm!r}")

    prefix = greedy_prefix(instance)
    if prefix.complete:
        witness = None
        if config.witness:
            witness = tuple((t, c) for t, c in enumerate(prefix.counts) if c > 0)
        return Solution(prefix.profit, witness, {
            "algorithm": "pipeline", "seed": config.seed,
            "greedy_profit": prefix.profit,
            "residual_budget": prefix.residual,
            "reduced_items": 0,
            "elapsed_s": time.perf_counter() - t0,
        })
    diff = build_diff_instance(instance, prefix)
    reduced, report = reduce_items(diff, instance.w_max, config.safety)
    copies = []
    origin = []
    for i, it in enumerate(reduced.items):
        for _ in range(reduced.counts[i]):
            copies.append((it.weight, it.profit))
            origin.append(i)
    diff_sol = permdp_solve(
        copies, reduced.residual_budget,
        alpha=config.alpha,
        seed=mix_seed(config.seed, SEED_DIFF),
        want_witness=config.witness,
    )
    if diff_sol.witness is not None:
        counts = {}
        for i, c in diff_sol.witness:
            counts[origin[i]] = counts.get(origin[i], 0) + c
        diff_sol.witness = tuple(sorted(counts.items()))
    merged = recombine(instance, prefix, reduced, diff_sol)
    merged.meta.update({
        "algorithm": "pipeline",
        "seed": config.seed,
        "reduced_items": reduced.total_copies,
        "diff_items": diff.total_copies,
        "reduction_lines": report.to_lines(),
        "elapsed_s": time.perf_counter() - t0,
    })
    return merged
