"""Scan annealing time and field strength for the subset-sampling defaults.

For each (h0, tau) pair the script evolves every alpha of the schedule on a
batch of small instances and reports the fraction of probability mass on
feasible non-empty subsets (the expected per-alpha yield), averaged over alpha
and instances, plus the worst instance.  The defaults in ``hbpp.annealer``
came from this scan; the published setting (h0=10, tau=1e-14) is included
for comparison.

    python demos/calibrate_tau.py [--n 6 8] [--instances 12]
"""

import argparse
import itertools

import numpy as np

from hbpp.annealer import AnnealParams, anneal_distributions
from hbpp.instance import generate_instance
from hbpp.ising import subset_sums


def expected_yield(inst, params):
    out = anneal_distributions(inst, params)
    feasible = subset_sums(inst.weights) <= inst.capacity
    feasible[0] = False
    return float(out.probs[:, feasible].sum(axis=1).mean())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[6])
    ap.add_argument("--instances", type=int, default=12)
    ap.add_argument("--h0", type=float, nargs="+", default=[1e3, 3e3, 1e4])
    ap.add_argument("--tau", type=float, nargs="+", default=[3e-3, 1e-2, 3e-2])
    args = ap.parse_args()

    dists = ("gauss1", "gauss2", "uniform")
    caps = (100, 120, 150)
    insts = [
        generate_instance(n, caps[i % 3], dists[(i // 3) % 3], seed=i)
        for n in args.n
        for i in range(args.instances)
    ]
    grid = [(10.0, 1e-14)] + list(itertools.product(args.h0, args.tau))
    for h0, tau in grid:
        params = AnnealParams(h0=h0, tau=tau)
        ys = np.array([expected_yield(inst, params) for inst in insts])
        print(f"h0={h0:<8g} tau={tau:<8g} mean={ys.mean():.3f} min={ys.min():.3f}")


if __name__ == "__main__":
    main()
