"""Exact reference results by exhaustive search over set partitions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .annealer import SubsetPool, index_to_items
from .heuristic import Solution
from .instance import Instance
from .ising import SizeCapError, subset_sums

DEFAULT_ORACLE_CAP = 14


@dataclass
class OracleReport:
    b_opt: int
    num_optima: int
    ideal_subset: set[frozenset[int]]
    optima: set[Solution] = field(default_factory=set)

    @property
    def ideal_subset_size(self) -> int:
        return len(self.ideal_subset)

    def to_dict(self, store_optima: bool = False) -> dict:
        data = {
            "b_opt": self.b_opt,
            "num_optima": self.num_optima,
            "ideal_subset_size": self.ideal_subset_size,
            "ideal_subset": sorted(sorted(b) for b in self.ideal_subset),
        }
        if store_optima:
            data["optima"] = [s.to_dict() for s in sorted(self.optima)]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "OracleReport":
        return cls(
            b_opt=data["b_opt"],
            num_optima=data["num_optima"],
            ideal_subset={frozenset(b) for b in data["ideal_subset"]},
            optima={Solution.from_dict(s) for s in data.get("optima", [])},
        )

    def save(self, path, store_optima: bool = False) -> None:
        Path(path).write_text(json.dumps(self.to_dict(store_optima)) + "\n", encoding="utf-8")


def _partitions(weights: list[int], capacity: int, b: int, first_only: bool) -> list[list[int]]:
    """Restricted-growth strings of length n with exactly ``b`` capacity-feasible blocks."""
    n = len(weights)
    total = sum(weights)
    labels = [0] * n
    loads: list[int] = []
    found: list[list[int]] = []
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]

    def room() -> int:
        return sum(capacity - x for x in loads) + (b - len(loads)) * capacity

    def rec(i: int) -> bool:
        if i == n:
            if len(loads) == b:
                found.append(labels.copy())
                return first_only
            return False
        # remaining items must fit in what is left; every unopened block needs an item
        if suffix[i] > room() or n - i < b - len(loads):
            return False
        w = weights[i]
        for j in range(len(loads)):
            if loads[j] + w <= capacity:
                loads[j] += w
                labels[i] = j
                if rec(i + 1):
                    return True
                loads[j] -= w
        if len(loads) < b:
            loads.append(w)
            labels[i] = len(loads) - 1
            stop = rec(i + 1)
            loads.pop()
            if stop:
                return True
        return False

    if total <= b * capacity:
        rec(0)
    return found


def _labels_to_solution(labels: list[int]) -> Solution:
    bins: dict[int, list[int]] = {}
    for item, lab in enumerate(labels, start=1):
        bins.setdefault(lab, []).append(item)
    return Solution.from_bins(bins.values())


def brute_force_optimum(instance: Instance, cap: int = DEFAULT_ORACLE_CAP) -> OracleReport:
    """Minimum bin count, every distinct optimal packing, and the bins those packings use."""
    if instance.n > cap:
        raise SizeCapError(f"{instance.n} items exceeds the oracle cap of {cap}")
    weights = list(instance.weights)
    C = instance.capacity
    if sum(weights) <= C:
        b = 1
    else:
        b = 2
        while not _partitions(weights, C, b, first_only=True):
            b += 1
    optima = {_labels_to_solution(lab) for lab in _partitions(weights, C, b, first_only=False)}
    ideal = {frozenset(bin_) for sol in optima for bin_ in sol.bins}
    return OracleReport(b_opt=b, num_optima=len(optima), ideal_subset=ideal, optima=optima)


def enumerate_feasible_subsets(instance: Instance, cap: int = 24) -> SubsetPool:
    """Every nonempty subset whose weight fits one bin, each with multiplicity 1."""
    if instance.n > cap:
        raise SizeCapError(f"{instance.n} items exceeds the enumeration cap of {cap}")
    sums = subset_sums(instance.weights)
    pool = SubsetPool(instance)
    for b in range(1, sums.size):
        if sums[b] <= instance.capacity:
            pool.add(index_to_items(b))
    return pool


@dataclass
class Verdict:
    valid: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


def bins_from_vectors(vectors) -> list[list[int]]:
    """Convert 0/1 occupation vectors (one per bin) into lists of 1-based items."""
    return [[i + 1 for i, v in enumerate(vec) if v] for vec in vectors]


def verify_solution(instance: Instance, solution) -> Verdict:
    """Check disjointness, full coverage and per-bin capacity.

    ``solution`` is a :class:`Solution` or an iterable of bins given as
    collections of 1-based item indices (see :func:`bins_from_vectors`).
    """
    bins = solution.bins if isinstance(solution, Solution) else [list(b) for b in solution]
    n = instance.n
    violations = []
    owner: dict[int, int] = {}
    for j, b in enumerate(bins, start=1):
        for i in b:
            if not 1 <= i <= n:
                violations.append(f"bin {j}: item {i} does not exist")
            elif i in owner:
                violations.append(f"item {i} assigned twice (bins {owner[i]} and {j})")
            else:
                owner[i] = j
        load = sum(instance.weights[i - 1] for i in b if 1 <= i <= n)
        if load > instance.capacity:
            violations.append(f"capacity violated in bin {j}: {load} > {instance.capacity}")
    for i in range(1, n + 1):
        if i not in owner:
            violations.append(f"item {i} not assigned to any bin")
    return Verdict(valid=not violations, violations=violations)
