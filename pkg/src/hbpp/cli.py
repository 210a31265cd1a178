"""Command-line entry point: ``hbpp generate|sample|solve|oracle|bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .annealer import (
    DEFAULT_H0,
    DEFAULT_TAU,
    AnnealParams,
    SubsetPool,
    augment_with_singletons,
    sample_subsets,
)
from .bench import BenchmarkConfig, run_benchmark
from .heuristic import solve
from .instance import Distribution, generate_instance, load_instance, save_instance
from .oracle import brute_force_optimum


def _cmd_generate(args) -> int:
    inst = generate_instance(args.n, args.capacity, args.dist, args.seed, name=args.name)
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(inst.to_dict(), indent=2))
    return 0


def _cmd_sample(args) -> int:
    inst = load_instance(args.instance)
    params = AnnealParams(
        shots_per_k=args.shots,
        beta_scale=args.beta_scale,
        tau=args.tau,
        n_steps=args.steps,
        h0=args.h0,
    )
    sampled = sample_subsets(inst, params, seed=args.seed)
    if args.pool_out:
        sampled.pool.save(args.pool_out)
    else:
        print(json.dumps(sampled.pool.to_json()))
    if args.diagnostics_out:
        sampled.save_diagnostics(args.diagnostics_out)
    mean_yield = sum(d.feasible_fraction for d in sampled.diagnostics) / len(sampled.diagnostics)
    print(
        f"pool_size={len(sampled.pool)} schedule_entries={len(sampled.diagnostics)} "
        f"mean_feasible_fraction={mean_yield:.3f}",
        file=sys.stderr,
    )
    return 0


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    pool = SubsetPool.load(args.pool, inst)
    if args.add_singletons:
        augment_with_singletons(pool, inst)
    result = solve(pool, inst.n, args.max_iter, args.seed, weighted=args.weighted)
    if not result.found:
        print(
            f"no complete solution found in {result.iterations_run} passes "
            f"(pool of {len(pool)} subsets)",
            file=sys.stderr,
        )
        return 2
    best = min(result.distinct_best)
    if args.out:
        best.save(args.out)
    print(json.dumps(best.to_dict()))
    print(
        f"best_b={result.best_b} distinct_best={len(result.distinct_best)} "
        f"complete_passes={result.iterations_with_complete_solution}",
        file=sys.stderr,
    )
    return 0


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    report = brute_force_optimum(inst, cap=args.cap)
    print(f"b_opt={report.b_opt} optima={report.num_optima} ideal={report.ideal_subset_size}")
    if args.out:
        report.save(args.out, store_optima=args.store_optima)
    elif args.store_optima:
        print(json.dumps(report.to_dict(store_optima=True)))
    return 0


def _cmd_bench(args) -> int:
    config = BenchmarkConfig.load(args.config)
    if args.workers is not None:
        config.workers = args.workers
    result = run_benchmark(config)
    print(
        f"instances={len(result.summaries)} runs={len(result.records)} "
        f"optimum_rate={result.optimum_rate:.3f} failures={len(result.failures)} "
        f"output={config.output_dir}"
    )
    return 1 if result.failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbpp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random instance")
    p.add_argument("--n", type=int, required=True, help="number of items")
    p.add_argument("--capacity", type=int, required=True, help="bin capacity")
    p.add_argument("--dist", choices=[d.value for d in Distribution], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None, help="instance name (default: n_C_tag)")
    p.add_argument("--out", type=Path, help="output JSON file (default: stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sample", help="run the annealing sampler and write the subset pool")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--shots", type=int, default=1000, help="shots per alpha value (default 1000)")
    p.add_argument("--beta-scale", type=float, default=0.2,
                   help="beta = scale * min weight (default 0.2)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU,
                   help=f"total evolution time, dimensionless (default {DEFAULT_TAU})")
    p.add_argument("--steps", type=int, default=500, help="number of evolution steps (default 500)")
    p.add_argument("--h0", type=float, default=DEFAULT_H0,
                   help=f"transverse field strength (default {DEFAULT_H0:g})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pool-out", type=Path, help="pool JSON file (default: stdout)")
    p.add_argument("--diagnostics-out", type=Path, help="per-alpha diagnostics CSV")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("solve", help="build packings from a subset pool")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--pool", type=Path, required=True)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--add-singletons", action="store_true",
                   help="add every single-item subset to the pool before solving")
    p.add_argument("--weighted", action="store_true",
                   help="bias each shuffle by how often a subset was sampled")
    p.add_argument("--out", type=Path, help="write the best solution JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--store-optima", action="store_true", help="include every optimum in the report")
    p.add_argument("--cap", type=int, default=14, help="largest instance size accepted")
    p.add_argument("--out", type=Path, help="report JSON file")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bench", help="run a benchmark described by a JSON config")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--workers", type=int, default=None, help="override the config's worker count")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
