import pytest

from helpers import BOUNDED_FAMILIES, rand_01, rng_for
from knapkit.baselines import GuardExceeded, bellman_bounded, brute_force_01
from knapkit.model import BoundedInstance, witness_violations
from knapkit.pipeline import SolverConfig, mix_seed, solve_01, solve_bounded
from knapkit.proximity import greedy_prefix

E1 = [(2, 6), (3, 6), (4, 4)]


def test_solve_01_example_all_paths():
    for algo in ("auto", "bellman", "permdp", "brute", "pipeline"):
        sol = solve_01(E1, 6, SolverConfig(algorithm=algo))
        assert sol.profit == 12, algo


def test_solve_01_auto_uses_the_exact_table_when_small():
    sol = solve_01(E1, 6, SolverConfig(algorithm="auto"))
    assert sol.meta["algorithm"] == "bellman"


def test_solve_01_auto_switches_past_the_cell_guard():
    cfg = SolverConfig(algorithm="auto", bellman_cells=10)
    sol = solve_01(E1, 6, cfg)
    assert sol.meta["algorithm"] == "permdp"
    assert sol.profit == 12


def test_solve_01_rejects_invalid_items():
    with pytest.raises(ValueError):
        solve_01([(0, 5)], 6)


def test_solve_01_agreement_with_brute():
    rng = rng_for(51)
    for _ in range(120):
        items, capacity = rand_01(rng, n_max=14)
        want, _ = brute_force_01(items, capacity)
        got = solve_01(items, capacity, SolverConfig(algorithm="permdp", seed=3))
        assert got.profit == want


def test_solve_bounded_example():
    inst = BoundedInstance.from_rows([(5, 5, 2), (4, 3, 2)], 8)
    for algo in ("auto", "bellman", "pipeline", "brute", "permdp"):
        assert solve_bounded(inst, SolverConfig(algorithm=algo)).profit == 6, algo


def test_pipeline_reduction_is_a_no_op_on_distinct_singletons():
    rng = rng_for(52)
    weights = rng.choice(range(1, 40), size=12, replace=False)
    items = [(int(w), int(rng.integers(1, 30))) for w in weights]
    inst = BoundedInstance.from_rows([(w, p, 1) for w, p in items], 60)
    sol = solve_bounded(inst, SolverConfig(algorithm="pipeline", seed=9))
    if sol.meta.get("reduced_items", 0):
        assert sol.meta["reduced_items"] == sol.meta["diff_items"]
    assert sol.profit == solve_01(items, 60, SolverConfig(algorithm="bellman")).profit


def test_pipeline_complete_prefix_short_circuits():
    inst = BoundedInstance.from_rows([(2, 3, 2), (3, 4, 1)], 50)
    sol = solve_bounded(inst, SolverConfig(algorithm="pipeline", witness=True))
    assert sol.profit == 10
    assert sol.witness == ((0, 2), (1, 1))
    assert sol.meta["reduced_items"] == 0


def test_pipeline_agreement_with_bounded_oracle():
    rng = rng_for(53)
    cfg = SolverConfig(algorithm="pipeline", alpha=4, safety=2, seed=17)
    for i in range(120):
        inst = BOUNDED_FAMILIES[i % len(BOUNDED_FAMILIES)](rng, n_max=30, m_max=8)
        assert solve_bounded(inst, cfg).profit == bellman_bounded(inst), (i, inst)


def test_pipeline_never_exceeds_the_optimum():
    # one-sided soundness survives the whole pipeline, even at unreliable alpha
    rng = rng_for(56)
    for i in range(50):
        inst = BOUNDED_FAMILIES[i % len(BOUNDED_FAMILIES)](rng, n_max=20, m_max=6)
        want = bellman_bounded(inst)
        for alpha in (1, 4):
            cfg = SolverConfig(algorithm="pipeline", alpha=alpha, seed=i)
            assert solve_bounded(inst, cfg).profit <= want


def test_pipeline_profit_at_least_greedy():
    rng = rng_for(54)
    cfg = SolverConfig(algorithm="pipeline", seed=23)
    for _ in range(60):
        inst = BOUNDED_FAMILIES[int(rng.integers(0, len(BOUNDED_FAMILIES)))](rng, n_max=25)
        assert solve_bounded(inst, cfg).profit >= greedy_prefix(inst).profit


def test_witnesses_validate_everywhere():
    rng = rng_for(55)
    for i in range(60):
        inst = BOUNDED_FAMILIES[i % len(BOUNDED_FAMILIES)](rng, n_max=16, m_max=5)
        for algo in ("pipeline", "bellman"):
            sol = solve_bounded(inst, SolverConfig(algorithm=algo, seed=i, witness=True))
            assert sol.witness is not None
            assert witness_violations(inst, sol) == [], (algo, inst)


def test_solve_bounded_brute_guard():
    inst = BoundedInstance.from_rows([(2, 3, 100)], 50)
    with pytest.raises(GuardExceeded):
        solve_bounded(inst, SolverConfig(algorithm="brute"))


def test_runs_are_reproducible():
    inst = BoundedInstance.from_rows([(5, 7, 3), (3, 4, 4), (6, 6, 2)], 20)
    cfg = SolverConfig(algorithm="pipeline", seed=77, witness=True)
    a = solve_bounded(inst, cfg)
    b = solve_bounded(inst, cfg)
    assert (a.profit, a.witness) == (b.profit, b.witness)


def test_mix_seed_spreads_and_repeats():
    assert mix_seed(0, 1) == mix_seed(0, 1)
    seen = {mix_seed(s, phase) for s in range(50) for phase in range(3)}
    assert len(seen) == 150
    assert all(0 <= x < 2**64 for x in seen)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(alpha=0.5)
    with pytest.raises(ValueError):
        SolverConfig(safety=0.0)
    with pytest.raises(ValueError):
        solve_01(E1, 6, SolverConfig(algorithm="nonsense"))
