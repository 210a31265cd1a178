# The exact side: optimum bin count, every optimal packing, and the bins they use.
#
#   python demos/oracle_census.py

from hbpp.instance import Instance, generate_instance
from hbpp.oracle import brute_force_optimum

for inst in (
    Instance(name="pairs", capacity=100, weights=(50, 50, 50, 50)),
    Instance(name="heavy", capacity=100, weights=(60, 60, 60)),
    generate_instance(10, 150, "uniform", seed=4),
):
    report = brute_force_optimum(inst)
    print(f"{inst.name}: weights {inst.weights}")
    print(f"  b_opt={report.b_opt}  optima={report.num_optima}  ideal subsets={report.ideal_subset_size}")
    for sol in sorted(report.optima, key=lambda s: s.bins)[:3]:
        print("   ", [sorted(b) for b in sol.bins])
