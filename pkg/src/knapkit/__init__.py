"""Exact pseudo-polynomial knapsack solvers and their verification harness."""

from .baselines import (
    GuardExceeded,
    bellman_01,
    bellman_bounded,
    brute_force_01,
    diff_exact,
)
from .model import (
    BoundedInstance,
    DiffInstance,
    ItemType,
    SignedItem,
    Solution,
    efficiency_order,
    validate,
)
from .permdp import WindowPlan, permdp_solve, window_schedule
from .pipeline import SolverConfig, solve_01, solve_bounded
from .proximity import GreedyPrefix, build_diff_instance, greedy_prefix, recombine
from .reduction import ReductionReport, frobenius_bound, reduce_items

__version__ = "0.1.0"

__all__ = [
    "BoundedInstance",
    "DiffInstance",
    "GreedyPrefix",
    "GuardExceeded",
    "ItemType",
    "ReductionReport",
    "SignedItem",
    "Solution",
    "SolverConfig",
    "WindowPlan",
    "bellman_01",
    "bellman_bounded",
    "brute_force_01",
    "build_diff_instance",
    "diff_exact",
    "efficiency_order",
    "frobenius_bound",
    "greedy_prefix",
    "permdp_solve",
    "recombine",
    "reduce_items",
    "solve_01",
    "solve_bounded",
    "validate",
    "window_schedule",
]
