"""Command line interface: instance generation, solving, verification, benchmarking.

Instance file format: first line "n W", then n lines "w p m" (m optional,
defaults to 1), ASCII decimal with single spaces. Bench records go to stdout
as CSV; the human summary, including the log-log time-vs-n slope per
algorithm, goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import statistics
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import baselines
from .baselines import GuardExceeded
from .model import BoundedInstance, ItemType, validate
from .pipeline import SEED_TRIAL, SolverConfig, mix_seed, solve_01, solve_bounded

SEED_ENV_VAR = "KNAPKIT_SEED"
BENCH_COLUMNS = [
    "instance_id", "n", "W", "w_max", "p_max", "algorithm", "seed",
    "alpha", "safety", "profit", "reduced_items", "elapsed_ns", "verified",
]
DISTRIBUTIONS = ("uniform", "correlated", "clustered-weights")


class InstanceFormatError(ValueError):
    pass


def parse_instance_text(text: str) -> BoundedInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InstanceFormatError("empty instance file")
    head = lines[0].split()
    if len(head) != 2:
        raise InstanceFormatError(f"header must be 'n W', got {lines[0]!r}")
    try:
        n, capacity = int(head[0]), int(head[1])
    except ValueError as e:
        raise InstanceFormatError(f"bad header: {e}") from None
    if len(lines) - 1 != n:
        raise InstanceFormatError(f"header says {n} items, file has {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise InstanceFormatError(f"item line must be 'w p [m]', got {ln!r}")
        try:
            rows.append(tuple(int(x) for x in parts))
        except ValueError as e:
            raise InstanceFormatError(f"bad item line {ln!r}: {e}") from None
    return BoundedInstance.from_rows(rows, capacity)


def serialize_instance(instance: BoundedInstance) -> str:
    out = [f"{instance.n} {instance.capacity}"]
    for it in instance.items:
        out.append(f"{it.weight} {it.profit} {it.multiplicity}")
    return "\n".join(out) + "\n"


def generate_instance(
    n: int,
    w_max: int,
    p_max: int,
    m_max: int = 1,
    distribution: str = "uniform",
    seed: int = 0,
    capacity: Optional[int] = None,
    distinct: Optional[int] = None,
) -> BoundedInstance:
    """Deterministic random instance; capacity defaults to half the total weight."""
    if n < 1 or w_max < 1 or p_max < 1 or m_max < 1:
        raise ValueError("n, w_max, p_max, m_max must all be >= 1")
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if distribution == "clustered-weights":
        pool_size = distinct if distinct is not None else max(2, min(w_max, int(math.isqrt(w_max)) + 1))
        pool_size = min(pool_size, w_max)
        pool = rng.choice(np.arange(1, w_max + 1), size=pool_size, replace=False)
        weights = rng.choice(pool, size=n)
    else:
        weights = rng.integers(1, w_max + 1, size=n)
    if distribution == "correlated":
        jitter = max(1, w_max // 20)
        profits = np.clip(weights + rng.integers(-jitter, jitter + 1, size=n), 1, p_max)
    else:
        profits = rng.integers(1, p_max + 1, size=n)
    mults = rng.integers(1, m_max + 1, size=n) if m_max > 1 else np.ones(n, dtype=np.int64)
    rows = [(int(w), int(p), int(m)) for w, p, m in zip(weights, profits, mults)]
    if capacity is None:
        capacity = sum(w * m for w, _, m in rows) // 2
    return BoundedInstance.from_rows(rows, capacity)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV_VAR} or 0)")
    p.add_argument("--alpha", type=float, default=4.0, help="window confidence exponent, >= 1")
    p.add_argument("--safety", type=float, default=2.0, help="reduction proximity safety factor, >= 1")


def _config(args: argparse.Namespace, algorithm: str, witness: bool = False) -> SolverConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return SolverConfig(algorithm=algorithm, alpha=args.alpha, safety=args.safety,
                        seed=seed, witness=witness)


def _solve_instance(instance: BoundedInstance, config: SolverConfig):
    if config.algorithm in ("bellman", "permdp") and all(it.multiplicity == 1 for it in instance.items):
        pairs = [(it.weight, it.profit) for it in instance.items]
        return solve_01(pairs, instance.capacity, config)
    return solve_bounded(instance, config)


def cmd_gen(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    instance = generate_instance(
        args.n, args.w_max, args.p_max, args.m_max, args.dist, seed,
        capacity=args.capacity, distinct=args.distinct,
    )
    text = serialize_instance(instance)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        with open(args.file) as fh:
            instance = parse_instance_text(fh.read())
        problems = validate(instance)
        if problems:
            raise InstanceFormatError("; ".join(problems))
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InstanceFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    config = _config(args, args.algo, args.witness)
    try:
        sol = _solve_instance(instance, config)
    except GuardExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    print(f"profit {sol.profit}")
    if args.witness and sol.witness is not None:
        for t, c in sol.witness:
            print(f"take {t} {c}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    any_fail = False
    for path in args.files:
        try:
            with open(path) as fh:
                instance = parse_instance_text(fh.read())
            problems = validate(instance)
            if problems:
                raise InstanceFormatError("; ".join(problems))
        except (OSError, InstanceFormatError) as e:
            print(f"{path} - FAIL parse: {e}")
            any_fail = True
            continue
        try:
            want = baselines.bellman_bounded(instance)
        except GuardExceeded as e:
            print(f"{path} oracle SKIP {e}")
            continue
        for algo in ("pipeline", "permdp"):
            got: Optional[int] = None
            skipped = None
            for trial in range(args.trials):
                config = SolverConfig(
                    algorithm=algo, alpha=args.alpha, safety=args.safety,
                    seed=mix_seed(seed, SEED_TRIAL + trial),
                )
                try:
                    sol = _solve_instance(instance, config)
                except GuardExceeded as e:
                    skipped = str(e)
                    break
                if got is None or sol.profit != want:
                    got = sol.profit
                if sol.profit != want:
                    break
            if skipped is not None:
                print(f"{path} {algo} SKIP {skipped}")
                continue
            ok = got == want
            print(f"{path} {algo} {'PASS' if ok else 'FAIL'} got={got} want={want}")
            any_fail = any_fail or not ok
    return 1 if any_fail else 0


def _bench_instances(args: argparse.Namespace, seed: int) -> list[tuple[str, BoundedInstance]]:
    out = []
    if args.files:
        for path in args.files:
            with open(path) as fh:
                out.append((os.path.basename(path), parse_instance_text(fh.read())))
        return out
    sizes = [int(s) for s in args.sizes.split(",")]
    for n in sizes:
        for idx in range(args.instances):
            inst_seed = mix_seed(seed, n * 1000 + idx)
            inst = generate_instance(n, args.w_max, args.p_max, args.m_max, args.dist, inst_seed)
            out.append((f"gen-n{n}-i{idx}", inst))
    return out


def cmd_bench(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    algos = args.algos.split(",")
    instances = _bench_instances(args, seed)
    # warm JIT caches so the first record is not charged for compilation
    warm = generate_instance(8, args.w_max, args.p_max, 1, "uniform", seed=0)
    for algo in algos:
        try:
            _solve_instance(warm, SolverConfig(algorithm=algo, seed=0))
        except GuardExceeded:
            pass
    records = []
    for instance_id, instance in instances:
        for algo in algos:
            config = SolverConfig(algorithm=algo, alpha=args.alpha, safety=args.safety,
                                  seed=mix_seed(seed, SEED_TRIAL))
            elapsed = []
            sol = None
            try:
                for _ in range(args.repeats):
                    t0 = time.perf_counter_ns()
                    sol = _solve_instance(instance, config)
                    elapsed.append(time.perf_counter_ns() - t0)
            except GuardExceeded as e:
                print(f"skip {instance_id} {algo}: {e}", file=sys.stderr)
                continue
            verified = ""
            if args.verify:
                try:
                    verified = "1" if sol.profit == baselines.bellman_bounded(instance) else "0"
                except GuardExceeded:
                    verified = ""
            if args.report:
                for line in sol.meta.get("reduction_lines", []):
                    print(f"# {instance_id}: {line}", file=sys.stderr)
            records.append({
                "instance_id": instance_id,
                "n": instance.n,
                "W": instance.capacity,
                "w_max": instance.w_max,
                "p_max": instance.p_max,
                "algorithm": algo,
                "seed": config.seed,
                "alpha": args.alpha,
                "safety": args.safety,
                "profit": sol.profit,
                "reduced_items": sol.meta.get("reduced_items", ""),
                "elapsed_ns": int(statistics.median(elapsed)),
                "verified": verified,
            })
    records.sort(key=lambda r: (r["instance_id"], r["algorithm"]))
    writer = csv.DictWriter(sys.stdout, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    writer.writerows(records)
    _bench_summary(records, file=sys.stderr)
    return 0


def loglog_slope(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = [math.log(x) for x, _ in points]
    ys = [math.log(y) for _, y in points]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    den = sum((x - mx) ** 2 for x in xs)
    if den == 0:
        return float("nan")
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / den


def _bench_summary(records: list[dict], file=sys.stderr) -> None:
    by_algo: dict[str, dict[int, list[int]]] = {}
    for rec in records:
        by_algo.setdefault(rec["algorithm"], {}).setdefault(rec["n"], []).append(rec["elapsed_ns"])
    for algo, by_n in sorted(by_algo.items()):
        if len(by_n) < 2:
            print(f"# {algo}: need >= 2 distinct n for a slope", file=file)
            continue
        points = [(n, statistics.mean(v)) for n, v in sorted(by_n.items())]
        slope = loglog_slope(points)
        ns = ",".join(str(n) for n, _ in points)
        print(f"# {algo}: slope {slope:.3f} over n={ns}", file=file)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knapkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance file")
    g.add_argument("-n", type=int, required=True, dest="n")
    g.add_argument("--w-max", type=int, required=True)
    g.add_argument("--p-max", type=int, required=True)
    g.add_argument("--m-max", type=int, default=1)
    g.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    g.add_argument("--distinct", type=int, default=None,
                   help="distinct weight values for clustered-weights")
    g.add_argument("--capacity", type=int, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("file")
    s.add_argument("--algo", choices=("auto", "bellman", "permdp", "pipeline", "brute"),
                   default="auto")
    s.add_argument("--witness", action="store_true")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="compare solvers against the exact oracle")
    v.add_argument("files", nargs="+")
    v.add_argument("--trials", type=int, default=1)
    _add_solver_flags(v)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time solvers and emit CSV records")
    b.add_argument("--files", nargs="*", default=None)
    b.add_argument("--sizes", default="1024,2048,4096")
    b.add_argument("--instances", type=int, default=1, help="instances per size")
    b.add_argument("--w-max", type=int, default=64)
    b.add_argument("--p-max", type=int, default=64)
    b.add_argument("--m-max", type=int, default=1)
    b.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    b.add_argument("--algos", default="permdp")
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--verify", action="store_true")
    b.add_argument("--report", action="store_true",
                   help="print per-instance reduction summaries to stderr")
    _add_solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
