"""Windowed dynamic programming over a random item permutation.

The items are shuffled once, then a profit-by-weight DP row is computed per
item, restricted to a window around the expected prefix weight of an optimal
solution. Window half-widths follow the sampling-without-replacement
concentration bound, so the answer matches the true optimum with high
probability while never exceeding it: every computed cell corresponds to a
feasible selection, because reads outside the previous window fall back to
the initial row (0 at nonnegative weights, bottom below zero).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but degrade anyway
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

from .baselines import DpRow
from .model import Solution

INT32_PROFIT_LIMIT = 2**28
BOTTOM32 = -(2**30)
BOTTOM64 = -(2**62)
PROFIT_OVERFLOW_LIMIT = 2**60


@dataclass(eq=False)
class WindowPlan:
    """Per-step window bounds and the concentration parameters behind them."""

    n: int
    budget: int
    weight_lo: int  # most negative single-item weight, 0 if none
    weight_hi: int  # largest positive single-item weight
    alpha: float
    slack: int      # extra low-side widening: the largest item magnitude
    centers: np.ndarray
    half_widths: np.ndarray
    lows: np.ndarray
    highs: np.ndarray

    @property
    def value_range(self) -> int:
        return self.weight_hi - self.weight_lo

    def total_cells(self) -> int:
        return int((self.highs - self.lows + 1).sum())

    def max_width(self) -> int:
        return int((self.highs - self.lows).max()) + 1


def window_schedule(n: int, budget: int, weight_lo: int, weight_hi: int, alpha: float) -> WindowPlan:
    """Build the per-step DP windows.

    Step i is centered at round(i*budget/n) with half-width
    ceil((weight_hi-weight_lo) * sqrt(alpha*i*ln(n+1)/2)), which keeps the
    per-step miss probability at most 2*(n+1)**(-alpha). The low side gets
    `slack` extra room because the optimum's total weight may sit up to one
    item magnitude below the budget. Windows are clamped to the weights
    reachable after i items.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if weight_lo > 0 or weight_hi < 0 or weight_lo == weight_hi:
        raise ValueError(f"weight range [{weight_lo}, {weight_hi}] must straddle 0 with positive span")
    i = np.arange(1, n + 1, dtype=np.int64)
    centers = (2 * i * budget + n) // (2 * n)  # round half up
    span = weight_hi - weight_lo
    half = np.ceil(span * np.sqrt(alpha * i * math.log(n + 1) / 2.0)).astype(np.int64)
    slack = max(weight_hi, -weight_lo)
    lows = centers - half - slack
    highs = centers + half
    reach_lo = i * weight_lo
    reach_hi = i * weight_hi
    np.clip(lows, reach_lo, reach_hi, out=lows)
    np.clip(highs, reach_lo, reach_hi, out=highs)
    return WindowPlan(n, budget, weight_lo, weight_hi, alpha, slack, centers, half, lows, highs)


@dataclass(eq=False)
class PermDpState:
    """Everything reconstruct_witness needs: the permutation and retained rows."""

    permutation: np.ndarray
    weights: np.ndarray  # permuted order
    profits: np.ndarray  # permuted order
    rows: list[DpRow]    # rows[i-1] covers exactly [lows[i], highs[i]]
    bottom: int
    seed: int


@njit(cache=True)
def _dp_loop_compiled(wp, pp, lows, highs, bottom, bufa, bufb, keep_rows, flat):
    """Run every DP row; row i lands in bufb when i is odd, bufa when even.

    Targets j in [lo, hi] combine a skip read at j and a take read at j - w,
    where reads outside the previous window default to 0 at nonnegative
    weights and bottom below zero.
    """
    n = wp.shape[0]
    prev = bufa
    cur = bufb
    prev_lo = np.int64(0)
    prev_hi = np.int64(-1)
    pos = 0
    for step in range(n):
        lo = lows[step]
        hi = highs[step]
        wi = wp[step]
        pi = pp[step]
        a = max(lo, prev_lo)
        b = min(hi, prev_hi)
        if a > b:
            a = hi + 1
            b = hi
        for j in range(lo, min(a, 0)):
            cur[j - lo] = bottom
        for j in range(max(lo, 0), a):
            cur[j - lo] = 0
        for j in range(a, b + 1):
            cur[j - lo] = prev[j - prev_lo]
        for j in range(b + 1, min(hi + 1, 0)):
            cur[j - lo] = bottom
        for j in range(max(b + 1, 0), hi + 1):
            cur[j - lo] = 0
        c = max(lo - wi, prev_lo)
        d = min(hi - wi, prev_hi)
        for x in range(c, d + 1):
            t = prev[x - prev_lo] + pi
            k = x + wi - lo
            if t > cur[k]:
                cur[k] = t
        x1 = min(hi - wi, prev_lo - 1)
        for x in range(max(lo - wi, 0), x1 + 1):
            k = x + wi - lo
            if pi > cur[k]:
                cur[k] = pi
        x0 = max(max(lo - wi, prev_hi + 1), 0)
        for x in range(x0, hi - wi + 1):
            k = x + wi - lo
            if pi > cur[k]:
                cur[k] = pi
        if keep_rows:
            span = hi - lo + 1
            flat[pos : pos + span] = cur[:span]
            pos += span
        tmp = prev
        prev = cur
        cur = tmp
        prev_lo = lo
        prev_hi = hi
    return pos


def _dp_loop_python(wp, pp, lows, highs, bottom, bufa, bufb, keep_rows, flat):
    """Vectorized fallback with the exact segment structure of the compiled loop."""
    n = len(wp)
    bufs = (bufa, bufb)
    scratch = np.empty(len(bufa), dtype=bufa.dtype)
    prev = bufa[:0]
    prev_lo, prev_hi = 0, -1
    pos = 0

    def fill_defaults(buf, j0, j1, base):
        if j0 > j1:
            return
        split = min(max(0, j0), j1 + 1)
        if j0 < split:
            buf[j0 - base : split - base] = bottom
        if split <= j1:
            buf[split - base : j1 + 1 - base] = 0

    for step in range(1, n + 1):
        lo = int(lows[step - 1])
        hi = int(highs[step - 1])
        wi = int(wp[step - 1])
        pi = int(pp[step - 1])
        cur = bufs[step % 2][: hi - lo + 1]
        a, b = max(lo, prev_lo), min(hi, prev_hi)
        if a <= b:
            fill_defaults(cur, lo, a - 1, lo)
            cur[a - lo : b - lo + 1] = prev[a - prev_lo : b - prev_lo + 1]
            fill_defaults(cur, b + 1, hi, lo)
        else:
            fill_defaults(cur, lo, hi, lo)
        c, d = max(lo - wi, prev_lo), min(hi - wi, prev_hi)
        if c <= d:
            cand = scratch[: d - c + 1]
            np.add(prev[c - prev_lo : d - prev_lo + 1], pi, out=cand)
            tgt = cur[c + wi - lo : d + wi - lo + 1]
            np.maximum(tgt, cand, out=tgt)
        for x0, x1 in (
            (max(lo - wi, 0), min(hi - wi, prev_lo - 1)),
            (max(lo - wi, prev_hi + 1, 0), hi - wi),
        ):
            if x0 <= x1:
                tgt = cur[x0 + wi - lo : x1 + wi - lo + 1]
                np.maximum(tgt, pi, out=tgt)
        if keep_rows:
            span = hi - lo + 1
            flat[pos : pos + span] = cur
            pos += span
        prev = cur
        prev_lo, prev_hi = lo, hi
    return pos


def _coerce_items(items: Sequence) -> tuple[np.ndarray, np.ndarray]:
    weights = []
    profits = []
    for it in items:
        if isinstance(it, (tuple, list)):
            w, p = it[0], it[1]
        else:
            w, p = it.weight, it.profit
        if w == 0:
            raise ValueError("items must have nonzero weight")
        weights.append(w)
        profits.append(p)
    return np.asarray(weights, dtype=np.int64), np.asarray(profits, dtype=np.int64)


def permdp_solve(
    items: Sequence,
    budget: int,
    *,
    alpha: float = 4.0,
    seed: int = 0,
    want_witness: bool = False,
) -> Solution:
    """Solve a 0-1 (possibly signed-item) knapsack with the windowed DP.

    The result never exceeds the true optimum, and equals it with
    probability at least 1 - 2n*(n+1)**(-alpha) over the permutation.
    """
    t0 = time.perf_counter()
    if budget < 0:
        raise ValueError("budget must be >= 0")
    w_all, p_all = _coerce_items(items)
    n = len(w_all)
    meta = {"algorithm": "permdp", "seed": seed, "alpha": alpha, "steps": n}
    if n == 0:
        meta["elapsed_s"] = time.perf_counter() - t0
        meta["cells"] = 0
        return Solution(0, () if want_witness else None, meta)

    abs_p_sum = int(np.abs(p_all).sum())
    if abs_p_sum >= PROFIT_OVERFLOW_LIMIT:
        raise OverflowError("total |profit| too large for 64-bit DP values")
    if abs_p_sum < INT32_PROFIT_LIMIT:
        dtype, bottom = np.int32, BOTTOM32
    else:
        dtype, bottom = np.int64, BOTTOM64

    wmax_abs = int(np.abs(w_all).max())
    weight_lo = -wmax_abs if bool((w_all < 0).any()) else 0
    weight_hi = wmax_abs
    pos_total = int(w_all[w_all > 0].sum())
    plan = window_schedule(n, min(budget, pos_total), weight_lo, weight_hi, alpha)

    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    wp = w_all[perm]
    pp = p_all[perm]

    lows = plan.lows
    highs = plan.highs
    lens = highs - lows + 1
    width = int(lens.max())
    total_cells = int(lens.sum())
    bufa = np.empty(width, dtype=dtype)
    bufb = np.empty(width, dtype=dtype)
    flat = np.empty(total_cells if want_witness else 0, dtype=dtype)
    loop = _dp_loop_compiled if _HAVE_NUMBA else _dp_loop_python
    loop(wp, pp.astype(dtype), lows, highs, bottom, bufa, bufb, want_witness, flat)

    final_lo = int(lows[-1])
    final_hi = int(highs[-1])
    final = (bufb if n % 2 else bufa)[: final_hi - final_lo + 1]
    rows: list[DpRow] = []
    if want_witness:
        starts = np.concatenate(([0], np.cumsum(lens)))
        rows = [DpRow(int(lows[i]), flat[starts[i] : starts[i + 1]]) for i in range(n)]

    top = min(final_hi, budget)
    best = int(final[: top - final_lo + 1].max()) if top >= final_lo else 0
    profit = max(0, best)
    meta["cells"] = total_cells
    meta["max_window"] = width
    meta["value_range"] = plan.value_range
    meta["backend"] = "numba" if _HAVE_NUMBA else "numpy"

    witness: Optional[tuple[tuple[int, int], ...]] = None
    if want_witness:
        if profit == 0:
            witness = ()
        else:
            state = PermDpState(perm, wp, pp, rows, bottom, seed)
            end_j = final_lo + int(np.argmax(final[: top - final_lo + 1]))
            taken = reconstruct_witness(state, end_j)
            got_w = sum(int(w_all[t]) for t in taken)
            got_p = sum(int(p_all[t]) for t in taken)
            if got_p != profit or got_w > budget:
                raise RuntimeError(
                    f"witness backtrack corrupt: profit {got_p} vs {profit}, weight {got_w} vs budget {budget}"
                )
            witness = tuple((t, 1) for t in sorted(taken))
    meta["elapsed_s"] = time.perf_counter() - t0
    return Solution(profit, witness, meta)


def reconstruct_witness(state: PermDpState, end_j: int) -> tuple[int, ...]:
    """Backtrack from the final cell at weight end_j to the chain start.

    Returns the original indices (into the solver's input sequence) of the
    taken items. Reads outside a retained row use the same defaults as the
    forward pass, so the chain start shows up as a zero-valued nonnegative
    cell. Raises if the recorded values cannot be reproduced.
    """
    n = len(state.rows)
    bottom = state.bottom

    def read(step: int, j: int) -> int:
        default = 0 if j >= 0 else bottom
        if step == 0:
            return default
        return state.rows[step - 1].get(j, default)

    taken: list[int] = []
    j = end_j
    v = read(n, j)
    for step in range(n, 0, -1):
        if read(step - 1, j) == v:
            continue  # prefer skipping; the value survived unchanged
        wi = int(state.weights[step - 1])
        pi = int(state.profits[step - 1])
        if read(step - 1, j - wi) == v - pi:
            taken.append(int(state.permutation[step - 1]))
            j -= wi
            v -= pi
            continue
        raise RuntimeError(f"backtrack stuck at step {step}, weight {j}, value {v}")
    if j < 0 or v != 0:
        raise RuntimeError(f"backtrack ended off the initial row (weight {j}, value {v})")
    return tuple(taken)
