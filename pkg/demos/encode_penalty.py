# Walk through the capacity penalty and its Ising form on a small instance.
#
#   python demos/encode_penalty.py

import itertools
from fractions import Fraction

import numpy as np

from hbpp.instance import generate_instance
from hbpp.ising import (
    alpha_schedule,
    build_ising,
    ising_energy,
    min_weight_gap,
    penalty_energy,
    subset_sums,
)

inst = generate_instance(5, 100, "gauss1", seed=3)
print("weights", inst.weights, "capacity", inst.capacity)

# Distinct subset sums are spaced at least delta_w apart, so the schedule
# steps its target weight by exactly that amount.
dw = min_weight_gap(inst.weights)
beta = Fraction(min(inst.weights), 5)  # beta_scale 0.2 kept exact
sched = alpha_schedule(inst.capacity, dw, beta)
print(f"delta_w = {dw}, beta = {beta}, {len(sched)} alpha values")
for e in list(sched)[:3]:
    print(f"  k={e.k:3d}  alpha={float(e.alpha):9.2f}  parabola vertex at S={e.target_weight}")

# Pick one alpha and check the Ising energy against the penalty on every assignment.
entry = list(sched)[len(sched) // 2]
model = build_ising(inst.weights, inst.capacity, entry.alpha, beta)
worst = max(
    abs(ising_energy(model, x) - penalty_energy(inst.weights, inst.capacity, entry.alpha, beta, x))
    for x in itertools.product((0, 1), repeat=inst.n)
)
print(f"max Ising/penalty mismatch over 2^{inst.n} assignments: {worst}")

# The lowest-energy subsets sit right at the target weight.
sums = subset_sums(inst.weights)
energy = float(entry.alpha) * (sums - inst.capacity) + float(beta) * (sums - inst.capacity) ** 2
order = np.argsort(energy, kind="stable")[:5]
print(f"lowest penalties for target {entry.target_weight}:")
for idx in order:
    print(f"  sum={sums[idx]:4d}  H_P={energy[idx]:10.2f}")
