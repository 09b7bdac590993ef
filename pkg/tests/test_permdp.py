import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import rand_01, rng_for
from knapkit.baselines import bellman_01, brute_force_01, diff_exact
from knapkit.model import diff_from_lists
from knapkit.permdp import permdp_solve, window_schedule


def test_window_half_width_formula():
    plan = window_schedule(100, 500, 0, 10, 4)
    # independent recomputation of the concentration width at step 25
    want = math.ceil(10 * math.sqrt(4 * 25 * math.log(101) / 2))
    assert want == 152
    assert int(plan.half_widths[24]) == 152
    assert int(plan.centers[24]) == 125


def test_window_final_step_covers_budget():
    plan = window_schedule(8, 20, 0, 7, 4)  # budget below total reach 8*7
    assert int(plan.highs[-1]) >= 20
    assert int(plan.lows[-1]) <= 20


def test_window_single_item_clamps_to_reach():
    plan = window_schedule(1, 10, 0, 5, 4)
    assert (int(plan.lows[0]), int(plan.highs[0])) == (0, 5)


@given(
    st.integers(1, 60),
    st.integers(0, 2000),
    st.integers(0, 1),
    st.integers(1, 50),
    st.integers(1, 6),
)
def test_window_invariants(n, budget, signed, w_max, alpha):
    lo = -w_max if signed else 0
    plan = window_schedule(n, budget, lo, w_max, alpha)
    i = np.arange(1, n + 1)
    assert (plan.lows <= plan.highs).all()
    assert (plan.lows >= i * lo).all()
    assert (plan.highs <= i * w_max).all()


def test_window_schedule_rejects_bad_args():
    with pytest.raises(ValueError):
        window_schedule(0, 5, 0, 5, 4)
    with pytest.raises(ValueError):
        window_schedule(3, 5, 0, 5, 0.5)
    with pytest.raises(ValueError):
        window_schedule(3, 5, 0, 0, 4)


def test_permdp_example():
    for seed in range(5):
        assert permdp_solve([(2, 6), (3, 6), (4, 4)], 6, alpha=4, seed=seed).profit == 12


def test_permdp_single_item():
    assert permdp_solve([(4, 9)], 5, seed=3).profit == 9
    assert permdp_solve([(6, 9)], 5, seed=3).profit == 0


def test_permdp_budget_beyond_total_weight_takes_everything():
    for seed in range(5):
        assert permdp_solve([(2, 3), (3, 4), (5, 1)], 10**6, seed=seed).profit == 8


def test_permdp_diff_example():
    diff = diff_from_lists([(4, 3, 2), (5, 5)], [(5, 5)], 3)
    copies = []
    for it, c in zip(diff.items, diff.counts):
        copies.extend([(it.weight, it.profit)] * c)
    for seed in range(5):
        assert permdp_solve(copies, 3, alpha=4, seed=seed).profit == 1


def test_permdp_no_items():
    sol = permdp_solve([], 5, want_witness=True)
    assert sol.profit == 0 and sol.witness == ()


def test_permdp_rejects_zero_weight():
    with pytest.raises(ValueError):
        permdp_solve([(0, 3)], 5)


def test_permdp_overflow_guard():
    with pytest.raises(OverflowError):
        permdp_solve([(1, 2**61)], 5)


def test_permdp_never_exceeds_the_optimum():
    # one-sided soundness holds for every seed, even at alpha too small to be reliable
    rng = rng_for(21)
    for _ in range(40):
        items, capacity = rand_01(rng, n_max=13)
        want = bellman_01(items, capacity)
        for alpha in (1, 2, 4):
            for seed in range(3):
                got = permdp_solve(items, capacity, alpha=alpha, seed=seed).profit
                assert got <= want


def test_permdp_matches_brute_at_alpha_4():
    rng = rng_for(22)
    for _ in range(80):
        items, capacity = rand_01(rng, n_max=14)
        want, _ = brute_force_01(items, capacity)
        assert permdp_solve(items, capacity, alpha=4, seed=7).profit == want


def full_window_instance():
    # windows cover the whole reachable range at every step for these sizes
    items = [(9, 5), (10, 4), (8, 8), (7, 2), (10, 10), (6, 3)]
    capacity = 25
    plan = window_schedule(len(items), capacity, 0, 10, 4)
    i = np.arange(1, len(items) + 1)
    assert (plan.lows == 0).all()
    assert (plan.highs == i * 10).all()
    return items, capacity


def test_permdp_bit_identical_to_bellman_when_windows_are_full():
    items, capacity = full_window_instance()
    want = bellman_01(items, capacity)
    for seed in range(30):
        assert permdp_solve(items, capacity, seed=seed).profit == want


def test_oracle_is_permutation_invariant():
    items, capacity = rand_01(rng_for(23), n_max=12)
    want = bellman_01(items, capacity)
    perm = rng_for(24).permutation(len(items))
    assert bellman_01([items[i] for i in perm], capacity) == want


def test_witness_reproduces_reported_profit():
    rng = rng_for(25)
    for _ in range(100):
        items, capacity = rand_01(rng, n_max=14)
        want, _ = brute_force_01(items, capacity)
        sol = permdp_solve(items, capacity, alpha=4, seed=11, want_witness=True)
        assert sol.witness is not None
        weight = sum(items[t][0] * c for t, c in sol.witness)
        profit = sum(items[t][1] * c for t, c in sol.witness)
        assert profit == sol.profit == want
        assert weight <= capacity


def test_witness_empty_when_nothing_fits():
    sol = permdp_solve([(8, 3), (9, 4)], 5, want_witness=True)
    assert sol.profit == 0 and sol.witness == ()


def test_witness_on_signed_items():
    diff = diff_from_lists([(4, 3, 2), (5, 5)], [(5, 5)], 3)
    copies = []
    for it, c in zip(diff.items, diff.counts):
        copies.extend([(it.weight, it.profit)] * c)
    sol = permdp_solve(copies, 3, seed=2, want_witness=True)
    assert sol.profit == diff_exact(diff) == 1
    weight = sum(copies[t][0] * c for t, c in sol.witness)
    profit = sum(copies[t][1] * c for t, c in sol.witness)
    assert profit == 1 and weight <= 3


def test_determinism_given_seed():
    items, capacity = rand_01(rng_for(26), n_max=14)
    a = permdp_solve(items, capacity, seed=5, want_witness=True)
    b = permdp_solve(items, capacity, seed=5, want_witness=True)
    assert (a.profit, a.witness) == (b.profit, b.witness)


def test_compiled_and_fallback_rows_agree():
    # both backends must implement the identical recurrence, cell for cell
    import numpy as np

    from knapkit import permdp as mod

    rng = rng_for(27)
    for _ in range(25):
        items, capacity = rand_01(rng, n_max=20)
        if rng.integers(0, 2):  # throw in signed items
            items = [(w if i % 3 else -w, p if i % 3 else -p) for i, (w, p) in enumerate(items)]
            capacity = int(rng.integers(0, max(abs(w) for w, _ in items)))
        n = len(items)
        w = np.array([it[0] for it in items], dtype=np.int64)
        p = np.array([it[1] for it in items], dtype=np.int64)
        lo = int(min(w.min(), 0))
        plan = window_schedule(n, capacity, -int(np.abs(w).max()) if lo < 0 else 0,
                               int(np.abs(w).max()), 2)
        lens = plan.highs - plan.lows + 1
        width = int(lens.max())
        total = int(lens.sum())
        out = []
        for loop in (mod._dp_loop_compiled, mod._dp_loop_python):
            bufa = np.empty(width, dtype=np.int64)
            bufb = np.empty(width, dtype=np.int64)
            flat = np.zeros(total, dtype=np.int64)
            loop(w, p, plan.lows, plan.highs, mod.BOTTOM64, bufa, bufb, True, flat)
            out.append(flat.copy())
        assert (out[0] == out[1]).all()
