"""Shuffle-and-greedy construction of complete packings from a pool of feasible subsets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# passes sharing one RNG stream; the stream for block i is seeded with (seed, i)
PASS_BLOCK = 1024


@dataclass(frozen=True, order=True)
class Solution:
    """A packing in canonical form: bins ordered by their smallest item, items ascending."""

    bins: tuple[tuple[int, ...], ...]

    @classmethod
    def from_bins(cls, bins: Iterable[Iterable[int]]) -> "Solution":
        canon = sorted(tuple(sorted(int(i) for i in b)) for b in bins)
        return cls(tuple(canon))

    @property
    def num_bins(self) -> int:
        return len(self.bins)

    def to_dict(self) -> dict:
        return {"num_bins": self.num_bins, "bins": [list(b) for b in self.bins]}

    @classmethod
    def from_dict(cls, data: dict) -> "Solution":
        sol = cls.from_bins(data["bins"])
        if data.get("num_bins", sol.num_bins) != sol.num_bins:
            raise ValueError("num_bins disagrees with the number of bins listed")
        return sol

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")


def greedy_pass(ordered_subsets: Sequence[Iterable[int]], n: int) -> Solution | None:
    """Accept each subset that is disjoint from everything accepted so far.

    Returns the packing as soon as all ``n`` items are covered, or ``None`` if
    the scan ends first.
    """
    full = set(range(1, n + 1))
    assigned: set[int] = set()
    bins = []
    for subset in ordered_subsets:
        subset = set(subset)
        if assigned.isdisjoint(subset):
            assigned |= subset
            bins.append(subset)
            if assigned == full:
                return Solution.from_bins(bins)
    return None


@dataclass
class HeuristicResult:
    best_b: int | None
    distinct_best: set[Solution] = field(default_factory=set)
    iterations_run: int = 0
    iterations_with_complete_solution: int = 0

    @property
    def found(self) -> bool:
        return self.best_b is not None


def _to_mask(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << (int(i) - 1)
    return m


def _canonical_subsets(pool) -> list[frozenset[int]]:
    subsets = pool.subsets() if hasattr(pool, "subsets") else list(pool)
    unique = {frozenset(s) for s in subsets}
    if any(not s for s in unique):
        raise ValueError("pool contains an empty subset")
    return sorted(unique, key=lambda s: sorted(s))


def _multiplicities(pool, subsets: list[frozenset[int]]) -> np.ndarray:
    if not hasattr(pool, "entry"):
        raise ValueError("weighted shuffles need a SubsetPool with multiplicities")
    return np.array([max(pool.entry(s).multiplicity, 1) for s in subsets], dtype=float)


def solve(
    pool, n: int, max_iter: int = 10000, rng_seed: int = 0, weighted: bool = False
) -> HeuristicResult:
    """Run ``max_iter`` greedy passes over fresh uniform shuffles of the deduplicated pool.

    ``pool`` is a :class:`~hbpp.annealer.SubsetPool` or any iterable of item sets.
    Passes are evaluated together on bitmasks, which gives the same outcome as
    calling :func:`greedy_pass` on each shuffled order.

    With ``weighted=True`` each pass instead orders subsets by a weighted draw
    without replacement, weight = sampling multiplicity (at least 1, so
    subsets added with count 0 still take part).
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if n > 62:
        raise ValueError("solve supports at most 62 items")
    subsets = _canonical_subsets(pool)
    result = HeuristicResult(best_b=None, iterations_run=max_iter)
    if not subsets:
        return result
    masks = np.array([_to_mask(s) for s in subsets], dtype=np.int64)
    weights = _multiplicities(pool, subsets) if weighted else None
    full = (1 << n) - 1
    if int(np.bitwise_or.reduce(masks)) & full != full:
        return result

    best_b = None
    best_rows: list[np.ndarray] = []
    complete_total = 0
    for block, start in enumerate(range(0, max_iter, PASS_BLOCK)):
        size = min(PASS_BLOCK, max_iter - start)
        rng = np.random.default_rng([rng_seed, block])
        if weights is None:
            order = rng.permuted(np.tile(np.arange(len(masks)), (size, 1)), axis=1)
        else:
            # smallest Exp(1)/w first: a draw without replacement proportional to w
            order = np.argsort(rng.exponential(size=(size, len(masks))) / weights, axis=1)
        ordered = masks[order]
        assigned = np.zeros(size, dtype=np.int64)
        accepted = np.zeros(ordered.shape, dtype=bool)
        for j in range(ordered.shape[1]):
            m = ordered[:, j]
            ok = (m & assigned) == 0
            accepted[:, j] = ok
            assigned |= np.where(ok, m, 0)
        complete = assigned == full
        complete_total += int(complete.sum())
        if not complete.any():
            continue
        counts = accepted.sum(axis=1)
        block_best = int(counts[complete].min())
        if best_b is None or block_best < best_b:
            best_b, best_rows = block_best, []
        if block_best == best_b:
            rows = np.flatnonzero(complete & (counts == best_b))
            best_rows.extend(np.sort(ordered[r][accepted[r]]) for r in rows)

    result.best_b = best_b
    result.iterations_with_complete_solution = complete_total
    seen = set()
    for row in best_rows:
        key = tuple(row.tolist())
        if key in seen:
            continue
        seen.add(key)
        result.distinct_best.add(
            Solution.from_bins([[i + 1 for i in range(n) if (m >> i) & 1] for m in key])
        )
    return result
