import itertools

import numpy as np
import pytest

from hbpp.annealer import SubsetPool
from hbpp.heuristic import PASS_BLOCK, Solution, greedy_pass, solve
from hbpp.instance import generate_instance
from hbpp.oracle import brute_force_optimum, enumerate_feasible_subsets, verify_solution

from conftest import make


def S(*bins):
    return Solution.from_bins(bins)


def test_solution_canonical_form():
    assert S({3}, {2, 1}) == S([1, 2], [3])
    assert S({3}, {2, 1}).bins == ((1, 2), (3,))
    assert S({4, 2}, {1, 3}).bins == ((1, 3), (2, 4))
    assert S({1}, {2}).num_bins == 2


def test_greedy_pass_examples():
    assert greedy_pass([{1, 2}, {3}, {1}, {2}], 3) == S({1, 2}, {3})
    assert greedy_pass([{1}, {2}], 3) is None
    sol = greedy_pass([{1}, {1, 2}, {2}, {3}], 3)
    assert sol == S({1}, {2}, {3}) and sol.num_bins == 3


def test_greedy_pass_stops_at_full_cover():
    # anything after the cover is complete is never looked at
    assert greedy_pass([{1, 2}, {3}, {99}], 3) == S({1, 2}, {3})


def test_solve_all_singletons():
    res = solve([{1}, {2}, {3}, {4}], 4, max_iter=50, rng_seed=0)
    assert res.best_b == 4
    assert res.distinct_best == {S({1}, {2}, {3}, {4})}
    assert res.iterations_with_complete_solution == 50


def brute_best_from_pool(pool, n):
    """Every packing built from pool members, by enumeration of disjoint covers."""
    full = frozenset(range(1, n + 1))
    best, sols = None, set()
    for r in range(1, n + 1):
        for combo in itertools.combinations(pool, r):
            if sum(len(c) for c in combo) == n and frozenset().union(*combo) == full:
                sol = Solution.from_bins(combo)
                if best is None or r < best:
                    best, sols = r, {sol}
                elif r == best:
                    sols.add(sol)
        if best is not None:
            break
    return best, sols


def test_solve_pairs_pool():
    pool = [{1, 2}, {3, 4}, {1}, {2}, {3}, {4}]
    best, sols = brute_best_from_pool([frozenset(p) for p in pool], 4)
    assert (best, sols) == (2, {S({1, 2}, {3, 4})})
    res = solve(pool, 4, max_iter=1000, rng_seed=3)
    assert res.best_b == 2
    assert res.distinct_best == {S({1, 2}, {3, 4})}


def test_solve_no_solution_when_item_missing():
    res = solve([{1, 2}, {3}, {4}], 5, max_iter=100, rng_seed=0)
    assert res.best_b is None and not res.found
    assert res.distinct_best == set()
    assert res.iterations_with_complete_solution == 0


def test_solve_empty_pool():
    res = solve([], 3, max_iter=10, rng_seed=0)
    assert not res.found


def test_solve_matches_scalar_greedy_on_same_orders():
    """The bitmask batch gives exactly what greedy_pass gives on each shuffled order."""
    pool = [frozenset(s) for s in
            ({1, 2}, {2, 3}, {3, 4}, {1}, {2}, {3}, {4}, {5}, {4, 5}, {1, 5})]
    canon = sorted(set(pool), key=sorted)
    max_iter = 300
    rng = np.random.default_rng([11, 0])
    order = rng.permuted(np.tile(np.arange(len(canon)), (max_iter, 1)), axis=1)
    sols = [greedy_pass([canon[j] for j in row], 5) for row in order]
    best = min(s.num_bins for s in sols if s)
    expected = {s for s in sols if s and s.num_bins == best}
    res = solve(pool, 5, max_iter=max_iter, rng_seed=11)
    assert res.best_b == best
    assert res.distinct_best == expected
    assert res.iterations_with_complete_solution == sum(s is not None for s in sols)


def test_solve_deterministic_and_dedup_insensitive():
    inst = generate_instance(7, 100, "uniform", seed=2)
    pool = enumerate_feasible_subsets(inst)
    a = solve(pool, inst.n, max_iter=2 * PASS_BLOCK + 7, rng_seed=5)
    b = solve(list(reversed(pool.subsets())) * 2, inst.n, max_iter=2 * PASS_BLOCK + 7, rng_seed=5)
    assert a == b


@pytest.mark.parametrize("seed", range(6))
def test_solutions_are_sound(seed):
    inst = generate_instance(7, 100, "gauss1", seed=seed)
    res = solve(enumerate_feasible_subsets(inst), inst.n, max_iter=500, rng_seed=seed)
    assert res.found
    for sol in res.distinct_best:
        assert sol.num_bins == res.best_b
        assert verify_solution(inst, sol)


def test_reachability_on_exhaustive_pools():
    for seed in range(8):
        inst = generate_instance(8, 100, ("gauss1", "gauss2", "uniform")[seed % 3], seed=100 + seed)
        res = solve(enumerate_feasible_subsets(inst), inst.n, max_iter=5000, rng_seed=seed)
        assert res.best_b == brute_force_optimum(inst).b_opt


def test_superset_pool_rarely_worse():
    inst = generate_instance(8, 100, "uniform", seed=77)
    full = enumerate_feasible_subsets(inst).subsets()
    rng = np.random.default_rng(0)
    no_worse = 0
    for trial in range(100):
        keep = rng.random(len(full)) < 0.35
        small = [s for s, k in zip(full, keep) if k] + [frozenset({i}) for i in range(1, 9)]
        big = small + [s for s, k in zip(full, keep) if not k and rng.random() < 0.5]
        a = solve(small, 8, max_iter=5000, rng_seed=trial)
        b = solve(big, 8, max_iter=5000, rng_seed=1000 + trial)
        no_worse += b.best_b <= a.best_b
    assert no_worse >= 95


def test_solution_json_round_trip(tmp_path):
    sol = S({2, 5}, {1}, {3, 4})
    path = tmp_path / "sol.json"
    sol.save(path)
    import json

    data = json.loads(path.read_text())
    assert data == {"num_bins": 3, "bins": [[1], [2, 5], [3, 4]]}
    assert Solution.from_dict(data) == sol


def test_solve_accepts_subset_pool():
    inst = make([5, 5, 5], 10)
    res = solve(enumerate_feasible_subsets(inst), 3, max_iter=200, rng_seed=1)
    assert res.best_b == 2
    assert len(res.distinct_best) == 3


def test_weighted_shuffle_follows_multiplicity():
    inst = make([5, 5, 5], 10)
    pool = SubsetPool(inst)
    pool.add([1, 2], count=10**6)
    for s in ([1, 3], [2, 3], [1], [2], [3]):
        pool.add(s)
    uniform = solve(pool, 3, max_iter=200, rng_seed=4)
    weighted = solve(pool, 3, max_iter=200, rng_seed=4, weighted=True)
    assert uniform.best_b == weighted.best_b == 2
    assert len(uniform.distinct_best) == 3
    assert weighted.distinct_best == {S([1, 2], [3])}


def test_weighted_needs_multiplicities():
    with pytest.raises(ValueError):
        solve([{1}, {2}], 2, weighted=True)
