# End-to-end pipeline on one instance: anneal, pool subsets, greedy cover, compare with brute force.
#
#   python demos/sample_and_solve.py

from hbpp.annealer import AnnealParams, sample_subsets
from hbpp.heuristic import solve
from hbpp.instance import generate_instance
from hbpp.oracle import brute_force_optimum, enumerate_feasible_subsets, verify_solution

inst = generate_instance(8, 120, "gauss2", seed=11)
print(inst.name, inst.weights)

params = AnnealParams()
sampled = sample_subsets(inst, params, seed=1)
yields = [d.feasible_fraction for d in sampled.diagnostics]
print(f"{len(sampled.diagnostics)} alpha values, mean feasible fraction {sum(yields) / len(yields):.2f}")

everything = enumerate_feasible_subsets(inst)
print(f"pool holds {len(sampled.pool)} of {len(everything)} feasible subsets")

result = solve(sampled.pool, inst.n, max_iter=2000, rng_seed=1)
report = brute_force_optimum(inst)
print(f"heuristic: {result.best_b} bins, brute force: {report.b_opt} bins "
      f"({report.num_optima} optimal packings)")

for sol in sorted(result.distinct_best, key=lambda s: s.bins)[:3]:
    assert verify_solution(inst, sol)
    print("  ", [sorted(b) for b in sol.bins], [inst.subset_weight(b) for b in sol.bins])
