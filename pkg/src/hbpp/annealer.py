"""Digitized annealing on a statevector and the subset-sampling loop that builds the pool.

Statevectors are plain complex ``numpy`` arrays of length ``2**n``; a 2-D
array of shape ``(K, 2**n)`` holds ``K`` independent states evolved in lockstep.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .instance import Instance
from .ising import (
    DEFAULT_DIAGONAL_CAP,
    AlphaSchedule,
    SizeCapError,
    alpha_schedule,
    build_ising,
    hp_diagonal,
    min_weight_gap,
    subset_sums,
)

# Calibrated on small instances (see demos/calibrate_tau.py); the literal
# published settings are AnnealParams(tau=1e-14, h0=10.0).
DEFAULT_TAU = 0.01
DEFAULT_H0 = 1.0e4


@dataclass(frozen=True)
class AnnealParams:
    """Settings for one subset-sampling sweep.

    ``beta`` is ``beta_scale * min(weights)`` unless given explicitly.
    ``h0 = 0`` switches the transverse field off, which only makes sense as a
    diagnostic.
    """

    shots_per_k: int = 1000
    beta_scale: float = 0.2
    tau: float = DEFAULT_TAU
    n_steps: int = 500
    h0: float = DEFAULT_H0
    beta: float | None = None

    def __post_init__(self):
        if self.shots_per_k < 1:
            raise ValueError("shots_per_k must be >= 1")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if not self.beta_scale > 0:
            raise ValueError("beta_scale must be > 0")
        if self.h0 < 0:
            raise ValueError("h0 must be >= 0")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("beta must be > 0")

    def beta_for(self, weights: Sequence[int]) -> float:
        if self.beta is not None:
            return float(self.beta)
        return self.beta_scale * min(weights)

    def to_dict(self) -> dict:
        return {
            "shots_per_k": self.shots_per_k,
            "beta_scale": self.beta_scale,
            "tau": self.tau,
            "n_steps": self.n_steps,
            "h0": self.h0,
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnnealParams":
        known = {"shots_per_k", "beta_scale", "tau", "n_steps", "h0", "beta"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown anneal parameters: {sorted(unknown)}")
        return cls(**data)


def initial_state(n: int, h0: float = 1.0) -> np.ndarray:
    """Ground state of ``h0 * sum_j X_j`` for ``h0 > 0``: the product of ``|->`` states."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(2**n, dtype=np.int64)
    parity = np.zeros(2**n, dtype=np.int64)
    for i in range(n):
        parity ^= (idx >> i) & 1
    return np.where(parity == 1, -1.0, 1.0).astype(complex) / np.sqrt(2.0**n)


def _apply_x_rotations(psi: np.ndarray, n: int, theta: float, buf: np.ndarray) -> None:
    """Apply ``exp(-i theta X)`` to every qubit of each row of ``psi``, in place."""
    c, s = np.cos(theta), np.sin(theta)
    rows = psi.shape[0]
    for q in range(n):
        shape = (rows * 2 ** (n - q - 1), 2, 2**q)
        v = psi.reshape(shape)
        t = buf.reshape(shape)
        # X swaps the |0>/|1> halves of axis 1
        np.multiply(v[:, ::-1, :], -1j * s, out=t)
        v *= c
        v += t


def evolve(
    state: np.ndarray,
    hp_diag: np.ndarray,
    params: AnnealParams,
) -> np.ndarray:
    """First-order digitized evolution under ``(1 - lam) * h0 * sum X + lam * H_P``.

    Step ``m = 1..n_steps`` uses ``lam = m / n_steps`` and ``dt = tau / n_steps``:
    the diagonal phase ``exp(-i lam dt H_P)`` first, then the transverse
    rotation on every qubit. ``state`` and ``hp_diag`` may both be 2-D with one
    row per independent evolution.
    """
    state = np.asarray(state, dtype=complex)
    hp_diag = np.asarray(hp_diag, dtype=float)
    single = state.ndim == 1
    psi = np.atleast_2d(state).copy()
    diag = np.atleast_2d(hp_diag)
    dim = psi.shape[1]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    if diag.shape[1] != dim or diag.shape[0] not in (1, psi.shape[0]):
        raise ValueError(f"hp_diag shape {hp_diag.shape} does not match state shape {state.shape}")
    steps = params.n_steps
    dt = params.tau / steps
    buf = np.empty_like(psi)
    # exp(-i lam_m dt H_P) = base**m, accumulated by repeated multiplication
    base = np.exp(-1j * (dt / steps) * diag)
    phase = np.ones_like(base)
    for m in range(1, steps + 1):
        lam = m / steps
        phase *= base
        psi *= phase
        theta = (1 - lam) * dt * params.h0
        if theta != 0.0:
            _apply_x_rotations(psi, n, theta, buf)
    return psi[0] if single else psi


def probabilities(state: np.ndarray) -> np.ndarray:
    p = np.abs(state) ** 2
    return p / p.sum(axis=-1, keepdims=True)


def measure(state: np.ndarray, shots: int, rng_seed) -> np.ndarray:
    """Draw ``shots`` basis indices i.i.d. from ``|amplitude|**2``.

    Bit ``i`` of each returned index is the outcome of qubit ``i`` (item ``i+1``).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return _draw(probabilities(np.asarray(state)), shots, rng)


def _draw(p: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(p.size, size=shots, p=p)


def index_to_bits(index: int, n: int) -> str:
    """Bitstring ``x_1 x_2 ... x_n`` for a basis index."""
    return "".join(str((int(index) >> i) & 1) for i in range(n))


def index_to_items(index: int) -> frozenset[int]:
    index = int(index)
    items = []
    i = 1
    while index:
        if index & 1:
            items.append(i)
        index >>= 1
        i += 1
    return frozenset(items)


@dataclass
class PoolEntry:
    weight: int
    multiplicity: int = 0
    ks: set[int] = field(default_factory=set)


class SubsetPool:
    """Deduplicated feasible subsets (sets of 1-based item indices) with sampling metadata."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._entries: dict[frozenset[int], PoolEntry] = {}

    def add(self, items: Iterable[int], k: int | None = None, count: int = 1) -> bool:
        """Insert a subset; returns True if it was new. Raises on empty or infeasible subsets."""
        items = frozenset(int(i) for i in items)
        if not items:
            raise ValueError("empty subset")
        if not all(1 <= i <= self.instance.n for i in items):
            raise ValueError(f"subset {sorted(items)} has items outside 1..{self.instance.n}")
        weight = self.instance.subset_weight(items)
        if weight > self.instance.capacity:
            raise ValueError(f"subset {sorted(items)} weighs {weight} > {self.instance.capacity}")
        entry = self._entries.get(items)
        is_new = entry is None
        if is_new:
            entry = self._entries[items] = PoolEntry(weight=weight)
        entry.multiplicity += count
        if k is not None:
            entry.ks.add(k)
        return is_new

    def merge(self, other: "SubsetPool") -> None:
        for items, e in other._entries.items():
            self.add(items, count=e.multiplicity)
            self._entries[items].ks |= e.ks

    def __contains__(self, items) -> bool:
        return frozenset(items) in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self.subsets())

    def entry(self, items) -> PoolEntry:
        return self._entries[frozenset(items)]

    def subsets(self) -> list[frozenset[int]]:
        """Subsets in canonical order (ascending sorted item tuples)."""
        return sorted(self._entries, key=lambda s: sorted(s))

    def to_json(self) -> list[dict]:
        return [
            {
                "items": sorted(s),
                "weight": self._entries[s].weight,
                "multiplicity": self._entries[s].multiplicity,
            }
            for s in self.subsets()
        ]

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path, instance: Instance) -> "SubsetPool":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise ValueError(f"{path}: pool file must hold a JSON array")
        pool = cls(instance)
        for row in data:
            items = row["items"]
            if "weight" in row and row["weight"] != instance.subset_weight(items):
                raise ValueError(f"{path}: stored weight of {items} disagrees with the instance")
            pool.add(items, count=int(row.get("multiplicity", 1)))
        return pool


@dataclass
class KDiagnostics:
    k: int
    alpha: float
    target_weight: int
    shots: int
    feasible_fraction: float
    distinct_new_subsets: int


@dataclass
class SamplingResult:
    pool: SubsetPool
    diagnostics: list[KDiagnostics]

    def save_diagnostics(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["k", "alpha", "target_weight", "shots", "feasible_fraction", "distinct_new_subsets"]
            )
            for d in self.diagnostics:
                writer.writerow(
                    [d.k, repr(float(d.alpha)), d.target_weight, d.shots,
                     f"{d.feasible_fraction:.6f}", d.distinct_new_subsets]
                )


@dataclass(frozen=True)
class AnnealOutput:
    """Final measurement distributions for every schedule entry of one instance."""

    schedule: AlphaSchedule
    probs: np.ndarray  # (len(schedule), 2**n)


def anneal_distributions(
    instance: Instance,
    params: AnnealParams,
    cap: int = DEFAULT_DIAGONAL_CAP,
    batch_size: int = 32,
) -> AnnealOutput:
    """Evolve one state per schedule entry and return the outcome probabilities.

    The distributions depend only on the instance and ``params`` (not on any
    seed), so callers running several sampling rounds can compute them once.
    """
    n = instance.n
    if n > cap:
        raise SizeCapError(f"{n} items exceeds the simulation cap of {cap}")
    beta = params.beta_for(instance.weights)
    schedule = alpha_schedule(instance.capacity, min_weight_gap(instance.weights), beta)
    psi0 = initial_state(n, params.h0 or 1.0)
    probs = np.empty((len(schedule), 2**n))
    entries = schedule.entries
    for start in range(0, len(entries), batch_size):
        chunk = entries[start:start + batch_size]
        diag = np.stack(
            [hp_diagonal(build_ising(instance.weights, instance.capacity, e.alpha, beta), cap)
             for e in chunk]
        )
        psi = evolve(np.tile(psi0, (len(chunk), 1)), diag, params)
        probs[start:start + len(chunk)] = probabilities(psi)
    return AnnealOutput(schedule=schedule, probs=probs)


def sample_subsets(
    instance: Instance,
    params: AnnealParams,
    seed: int = 0,
    anneal: AnnealOutput | None = None,
) -> SamplingResult:
    """Sample ``shots_per_k`` outcomes for every alpha of the schedule and pool the feasible ones.

    Each schedule entry ``k`` draws from its own stream seeded with ``(seed, k)``,
    so the pool does not depend on evaluation order.
    """
    if anneal is None:
        anneal = anneal_distributions(instance, params)
    sums = subset_sums(instance.weights)
    feasible = sums <= instance.capacity
    feasible[0] = False

    pool = SubsetPool(instance)
    diagnostics = []
    for entry, p in zip(anneal.schedule, anneal.probs):
        rng = np.random.default_rng([seed, entry.k])
        outcomes = _draw(p, params.shots_per_k, rng)
        kept = outcomes[feasible[outcomes]]
        idx, counts = np.unique(kept, return_counts=True)
        new = 0
        for b, c in zip(idx, counts):
            new += pool.add(index_to_items(b), k=entry.k, count=int(c))
        diagnostics.append(
            KDiagnostics(
                k=entry.k,
                alpha=entry.alpha,
                target_weight=entry.target_weight,
                shots=params.shots_per_k,
                feasible_fraction=kept.size / params.shots_per_k,
                distinct_new_subsets=new,
            )
        )
    return SamplingResult(pool=pool, diagnostics=diagnostics)


def augment_with_singletons(pool: SubsetPool, instance: Instance | None = None) -> SubsetPool:
    """Make sure every single-item subset is present (in place; returns the pool)."""
    instance = instance or pool.instance
    for i in range(1, instance.n + 1):
        if frozenset([i]) not in pool:
            pool.add([i], count=0)
    return pool

