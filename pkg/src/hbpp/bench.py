"""End-to-end experiment harness: hybrid runs, oracle comparison, CSV and Markdown tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

import numpy as np

from .annealer import (
    AnnealOutput,
    AnnealParams,
    SamplingResult,
    SubsetPool,
    anneal_distributions,
    augment_with_singletons,
    sample_subsets,
)
from .heuristic import HeuristicResult, solve
from .instance import Instance, generate_instance, load_instance
from .oracle import DEFAULT_ORACLE_CAP, OracleReport, brute_force_optimum

log = logging.getLogger(__name__)

RESULTS_HEADER = [
    "instance", "run", "best_b", "b_opt", "reached_optimum", "num_optima_found",
    "ideal_coverage", "ideal_size", "pool_size", "seconds_anneal", "seconds_heuristic",
]
EMPTY = "\u2014"  # rendered for means over an empty set of runs


@dataclass
class HBPPRun:
    sampled: SamplingResult
    pool: SubsetPool  # what the heuristic saw (sampled pool plus singletons, if enabled)
    result: HeuristicResult
    seconds_anneal: float = 0.0
    seconds_heuristic: float = 0.0


def _split_seed(seed: int) -> tuple[int, int]:
    sample_seed, solve_seed = np.random.SeedSequence(seed).generate_state(2)
    return int(sample_seed), int(solve_seed)


def run_hbpp(
    instance: Instance,
    anneal_params: AnnealParams,
    max_iter: int,
    seed: int,
    augment_singletons: bool = True,
    anneal: AnnealOutput | None = None,
) -> HBPPRun:
    """Sample feasible subsets, optionally add singletons, then build packings from them."""
    sample_seed, solve_seed = _split_seed(seed)
    t0 = time.perf_counter()
    if anneal is None:
        anneal = anneal_distributions(instance, anneal_params)
    sampled = sample_subsets(instance, anneal_params, seed=sample_seed, anneal=anneal)
    pool = SubsetPool(instance)
    pool.merge(sampled.pool)
    if augment_singletons:
        augment_with_singletons(pool, instance)
    t1 = time.perf_counter()
    result = solve(pool, instance.n, max_iter, solve_seed)
    t2 = time.perf_counter()
    return HBPPRun(sampled, pool, result, seconds_anneal=t1 - t0, seconds_heuristic=t2 - t1)


def ideal_subset_coverage(pool, report: OracleReport) -> int:
    """Number of distinct pool subsets that belong to the oracle's ideal subset."""
    subsets = pool.subsets() if hasattr(pool, "subsets") else pool
    return len({frozenset(s) for s in subsets} & report.ideal_subset)


@dataclass
class BenchmarkConfig:
    instances: list[Instance]
    runs_per_instance: int = 10
    anneal: AnnealParams = field(default_factory=AnnealParams)
    max_iter: int = 10000
    seed: int = 0
    output_dir: Path = Path("bench_out")
    augment_singletons: bool = True
    store_optima: bool = False
    record_timings: bool = False
    workers: int = 1
    oracle_cap: int = DEFAULT_ORACLE_CAP

    def __post_init__(self):
        if self.runs_per_instance < 1:
            raise ValueError("runs_per_instance must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.output_dir = Path(self.output_dir)
        # output files are keyed by name, so names must be unique
        seen: dict[str, int] = {}
        renamed = []
        for inst in self.instances:
            count = seen.get(inst.name, 0)
            seen[inst.name] = count + 1
            if count:
                inst = Instance(**{**inst.to_dict(), "name": f"{inst.name}_{count}"})
            renamed.append(inst)
        self.instances = renamed

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | str = ".") -> "BenchmarkConfig":
        base_dir = Path(base_dir)
        data = dict(data)
        instances = []
        for spec in data.pop("instances"):
            if isinstance(spec, str):
                spec = {"path": spec}
            if "path" in spec:
                path = Path(spec["path"])
                instances.append(load_instance(path if path.is_absolute() else base_dir / path))
            else:
                instances.append(
                    generate_instance(
                        spec["n"], spec["capacity"], spec["distribution"], spec.get("seed", 0),
                        name=spec.get("name"),
                    )
                )
        anneal = AnnealParams.from_dict(data.pop("anneal", {}))
        out = Path(data.pop("output_dir", "bench_out"))
        if not out.is_absolute():
            out = base_dir / out
        known = set(cls.__dataclass_fields__) - {"instances", "anneal", "output_dir"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(instances=instances, anneal=anneal, output_dir=out, **data)

    @classmethod
    def load(cls, path) -> "BenchmarkConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), base_dir=path.parent)


@dataclass
class RunRecord:
    instance: str
    run: int
    best_b: int | None
    b_opt: int
    reached_optimum: bool
    num_optima_found: int
    ideal_coverage: int
    ideal_size: int
    pool_size: int
    seconds_anneal: float
    seconds_heuristic: float


@dataclass
class InstanceSummary:
    instance: str
    b_opt: int
    num_optima: int
    ideal_size: int
    runs: list[RunRecord]

    @property
    def optimal_runs(self) -> list[RunRecord]:
        return [r for r in self.runs if r.reached_optimum]

    @property
    def missed_runs(self) -> list[RunRecord]:
        return [r for r in self.runs if not r.reached_optimum]

    @property
    def mean_best_b(self) -> float | None:
        vals = [r.best_b for r in self.runs if r.best_b is not None]
        return fmean(vals) if vals else None

    @property
    def mean_optima_found(self) -> float | None:
        vals = [r.num_optima_found for r in self.optimal_runs]
        return fmean(vals) if vals else None

    @property
    def mean_coverage_optimal(self) -> float | None:
        vals = [r.ideal_coverage for r in self.optimal_runs]
        return fmean(vals) if vals else None

    @property
    def mean_coverage_missed(self) -> float | None:
        vals = [r.ideal_coverage for r in self.missed_runs]
        return fmean(vals) if vals else None


@dataclass
class BenchmarkResult:
    summaries: list[InstanceSummary]
    failures: dict[str, str]

    @property
    def records(self) -> list[RunRecord]:
        return [r for s in self.summaries for r in s.runs]

    @property
    def optimum_rate(self) -> float:
        recs = self.records
        return sum(r.reached_optimum for r in recs) / len(recs) if recs else 0.0


def instance_key(instance: Instance) -> str:
    """Content hash of the instance file representation; used to cache oracle reports."""
    blob = json.dumps(instance.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def cached_oracle(instance: Instance, cache_dir: Path | None, cap: int) -> OracleReport:
    path = cache_dir / f"{instance_key(instance)}.json" if cache_dir else None
    if path is not None and path.exists():
        return OracleReport.from_dict(json.loads(path.read_text(encoding="utf-8")))
    report = brute_force_optimum(instance, cap=cap)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        report.save(path)
    return report


def _fmt(value: float | None) -> str:
    return EMPTY if value is None else f"{value:.1f}"


def results_csv(records: list[RunRecord], record_timings: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for r in records:
        writer.writerow([
            r.instance, r.run, "" if r.best_b is None else r.best_b, r.b_opt,
            int(r.reached_optimum), r.num_optima_found, r.ideal_coverage, r.ideal_size,
            r.pool_size,
            f"{r.seconds_anneal:.3f}" if record_timings else "",
            f"{r.seconds_heuristic:.3f}" if record_timings else "",
        ])
    return buf.getvalue()


def summary_markdown(result: BenchmarkResult) -> str:
    lines = [
        "## Hybrid runs against exact optima",
        "",
        "| Instance | mean b | mean # optima | mean ideal coverage | Opt. | # optima | ideal size |",
        "|---|---|---|---|---|---|---|",
    ]
    for s in result.summaries:
        lines.append(
            f"| {s.instance} | {_fmt(s.mean_best_b)} | {_fmt(s.mean_optima_found)} | "
            f"{_fmt(s.mean_coverage_optimal)} | {s.b_opt} | {s.num_optima} | {s.ideal_size} |"
        )
    lines += [
        "",
        "## Ideal-subset coverage in runs that missed the optimum",
        "",
        "| Instance | missed runs | mean ideal coverage |",
        "|---|---|---|",
    ]
    for s in result.summaries:
        cov = s.mean_coverage_missed
        cell = EMPTY if cov is None else f"{cov:.1f} (out of {s.ideal_size})"
        lines.append(f"| {s.instance} | {len(s.missed_runs)} | {cell} |")
    if result.failures:
        lines += ["", "## Failed instances", ""]
        lines += [f"- {name}: {msg}" for name, msg in result.failures.items()]
    lines.append(
        "\nOptima and coverage means use only the runs that reached the optimum; "
        f"{EMPTY} marks an empty set of runs."
    )
    return "\n".join(lines) + "\n"


def _run_seed(master: int, inst_index: int, run: int) -> int:
    return int(np.random.SeedSequence([master, inst_index, run]).generate_state(1)[0])


def run_benchmark(config: BenchmarkConfig, write: bool = True) -> BenchmarkResult:
    """Run every instance ``runs_per_instance`` times and aggregate against the oracle.

    Output is identical for a given master seed whatever ``config.workers`` is.
    """
    out = config.output_dir
    if write:
        for sub in ("pools", "solutions", "oracle"):
            (out / sub).mkdir(parents=True, exist_ok=True)
    cache_dir = out / "oracle_cache" if write else None

    summaries: list[InstanceSummary] = []
    failures: dict[str, str] = {}
    with ThreadPoolExecutor(max_workers=config.workers) as pool_exec:
        for idx, inst in enumerate(config.instances):
            try:
                report = cached_oracle(inst, cache_dir, config.oracle_cap)
                t0 = time.perf_counter()
                anneal = anneal_distributions(inst, config.anneal)
                evolve_seconds = time.perf_counter() - t0
                seeds = [_run_seed(config.seed, idx, r) for r in range(config.runs_per_instance)]
                runs = list(pool_exec.map(
                    lambda s: run_hbpp(inst, config.anneal, config.max_iter, s,
                                       config.augment_singletons, anneal),
                    seeds,
                ))
            except Exception as exc:  # one bad instance must not sink the batch
                log.exception("instance %s failed", inst.name)
                failures[inst.name] = f"{type(exc).__name__}: {exc}"
                continue

            records = []
            for r, hb in enumerate(runs, start=1):
                res = hb.result
                reached = res.best_b == report.b_opt
                records.append(RunRecord(
                    instance=inst.name,
                    run=r,
                    best_b=res.best_b,
                    b_opt=report.b_opt,
                    reached_optimum=reached,
                    num_optima_found=len(res.distinct_best) if reached else 0,
                    ideal_coverage=ideal_subset_coverage(hb.sampled.pool, report),
                    ideal_size=report.ideal_subset_size,
                    pool_size=len(hb.sampled.pool),
                    # the evolution is shared by all runs; charge it to each
                    seconds_anneal=hb.seconds_anneal + evolve_seconds,
                    seconds_heuristic=hb.seconds_heuristic,
                ))
                if write:
                    hb.sampled.pool.save(out / "pools" / f"{inst.name}_run{r}.json")
                    if res.distinct_best:
                        min(res.distinct_best).save(out / "solutions" / f"{inst.name}_run{r}.json")
            if write:
                report.save(out / "oracle" / f"{inst.name}.json", store_optima=config.store_optima)
            summaries.append(InstanceSummary(
                instance=inst.name,
                b_opt=report.b_opt,
                num_optima=report.num_optima,
                ideal_size=report.ideal_subset_size,
                runs=records,
            ))
            log.info("%s: mean b %s, opt %d", inst.name, _fmt(summaries[-1].mean_best_b), report.b_opt)

    result = BenchmarkResult(summaries=summaries, failures=failures)
    if write:
        (out / "results.csv").write_text(
            results_csv(result.records, config.record_timings), encoding="utf-8"
        )
        (out / "summary.md").write_text(summary_markdown(result), encoding="utf-8")
    return result
