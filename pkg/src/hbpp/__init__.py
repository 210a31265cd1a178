"""Hybrid annealing sampler and greedy set-cover heuristic for one-dimensional bin packing."""

from .annealer import AnnealParams, SubsetPool, augment_with_singletons, sample_subsets
from .bench import BenchmarkConfig, run_benchmark, run_hbpp
from .heuristic import HeuristicResult, Solution, solve
from .instance import Instance, generate_instance, load_instance, save_instance
from .ising import AlphaSchedule, IsingModel, alpha_schedule, build_ising, ising_energy, penalty_energy
from .oracle import OracleReport, brute_force_optimum, enumerate_feasible_subsets, verify_solution

__all__ = [
    "AlphaSchedule",
    "AnnealParams",
    "BenchmarkConfig",
    "HeuristicResult",
    "Instance",
    "IsingModel",
    "OracleReport",
    "Solution",
    "SubsetPool",
    "alpha_schedule",
    "augment_with_singletons",
    "brute_force_optimum",
    "build_ising",
    "enumerate_feasible_subsets",
    "generate_instance",
    "ising_energy",
    "load_instance",
    "penalty_energy",
    "run_benchmark",
    "run_hbpp",
    "sample_subsets",
    "save_instance",
    "solve",
    "verify_solution",
]
