"""Capacity-penalty Hamiltonian in Ising form, its classical energies, and the alpha schedule.

Spin convention: ``x_i = (1 - s_i) / 2``, so spin ``+1`` means item ``i`` is
left out of the subset. Basis index ``b`` stores ``x_{i+1}`` in bit ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

DEFAULT_DIAGONAL_CAP = 24


class SizeCapError(ValueError):
    """Requested an exhaustive object larger than the configured qubit/item cap."""


def subset_sums(weights: Sequence[int]) -> np.ndarray:
    """Weight of every subset, indexed by bitmask (bit ``i`` set means item ``i+1`` taken)."""
    sums = np.zeros(1, dtype=np.int64)
    for w in weights:
        sums = np.concatenate([sums, sums + int(w)])
    return sums


def basis_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array of occupation bits, row ``b`` being the assignment of index ``b``."""
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)


def min_weight_gap(weights: Sequence[int]) -> int:
    """Smallest positive difference between two distinct achievable subset sums."""
    if len(weights) == 0:
        raise ValueError("need at least one weight")
    sums = np.unique(subset_sums(weights))
    return int(np.diff(sums).min())


@dataclass(frozen=True)
class ScheduleEntry:
    k: int
    alpha: float
    target_weight: int


@dataclass(frozen=True)
class AlphaSchedule:
    delta_w: int
    beta: float
    entries: tuple[ScheduleEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def alphas(self) -> list:
        return [e.alpha for e in self.entries]


def alpha_schedule(capacity: int, delta_w: int, beta) -> AlphaSchedule:
    """Entries ``k = 1..floor(C / delta_w)`` with ``alpha_k = 2*beta*(C - k*delta_w)``.

    ``beta`` may be a float or an exact rational (``fractions.Fraction``); the
    alphas inherit its type.
    """
    if delta_w < 1:
        raise ValueError(f"delta_w must be >= 1, got {delta_w}")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    entries = tuple(
        ScheduleEntry(k=k, alpha=2 * beta * (capacity - k * delta_w), target_weight=k * delta_w)
        for k in range(1, capacity // delta_w + 1)
    )
    return AlphaSchedule(delta_w=delta_w, beta=beta, entries=entries)


@dataclass(frozen=True)
class IsingModel:
    """``E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset``.

    Coefficients are exact rationals (floats convert to ``Fraction`` without
    loss), so classical energies can be evaluated exactly and rounded once.
    """

    h: tuple[Fraction, ...]
    couplings: dict[tuple[int, int], Fraction]
    offset: Fraction

    @property
    def num_spins(self) -> int:
        return len(self.h)

    @cached_property
    def _scaled(self) -> tuple[int, list[int], list[tuple[int, int, int]], int]:
        """Coefficients over one common denominator, as Python ints."""
        values = [*self.h, *self.couplings.values(), self.offset]
        denom = math.lcm(*(v.denominator for v in values))
        h = [int(v * denom) for v in self.h]
        J = [(i, j, int(v * denom)) for (i, j), v in self.couplings.items()]
        return denom, h, J, int(self.offset * denom)

    def coupling_matrix(self) -> np.ndarray:
        """Upper-triangular ``(n, n)`` float array of couplings."""
        mat = np.zeros((self.num_spins, self.num_spins))
        for (i, j), v in self.couplings.items():
            mat[i, j] = float(v)
        return mat

    def to_dict(self) -> dict:
        return {
            "h": [float(v) for v in self.h],
            "J": [[i, j, float(v)] for (i, j), v in sorted(self.couplings.items())],
            "offset": float(self.offset),
        }


def build_ising(weights: Sequence[int], capacity: int, alpha, beta) -> IsingModel:
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    a, b = Fraction(alpha), Fraction(beta)
    w = [int(x) for x in weights]
    eps = Fraction(sum(w), 2) - capacity
    h = tuple(-wi * (a / 2 + b * eps) for wi in w)
    couplings = {
        (i, j): b * w[i] * w[j] / 2 for i in range(len(w)) for j in range(i + 1, len(w))
    }
    # constant dropped by the usual expansion; kept so energies match the penalty form
    offset = a * eps + b * eps * eps + b * sum(x * x for x in w) / 4
    return IsingModel(h=h, couplings=couplings, offset=offset)


def ising_energy(model: IsingModel, x: Sequence[int]) -> float:
    """Energy of the occupation bitstring ``x`` (``x[i]`` is item ``i+1``)."""
    if len(x) != model.num_spins:
        raise ValueError(f"assignment has length {len(x)}, model has {model.num_spins} spins")
    denom, h, J, offset = model._scaled
    s = [1 - 2 * int(b) for b in x]
    total = offset + sum(hi * si for hi, si in zip(h, s))
    total += sum(v * s[i] * s[j] for i, j, v in J)
    return float(Fraction(total, denom))


def penalty_energy(weights: Sequence[int], capacity: int, alpha, beta, x: Sequence[int]) -> float:
    """``alpha*(S - C) + beta*(S - C)**2`` with ``S`` the weight selected by ``x``."""
    if len(x) != len(weights):
        raise ValueError(f"assignment has length {len(x)}, expected {len(weights)}")
    excess = sum(int(w) * int(b) for w, b in zip(weights, x)) - capacity
    return float(Fraction(alpha) * excess + Fraction(beta) * excess * excess)


def hp_diagonal(model: IsingModel, cap: int = DEFAULT_DIAGONAL_CAP) -> np.ndarray:
    """Ising energy of every computational basis state, as a length ``2**n`` array."""
    n = model.num_spins
    if n > cap:
        raise SizeCapError(f"{n} spins exceeds the diagonal cap of {cap}")
    idx = np.arange(2**n, dtype=np.int64)
    spins = [1.0 - 2.0 * ((idx >> i) & 1) for i in range(n)]
    diag = np.full(2**n, float(model.offset))
    for i, hi in enumerate(model.h):
        diag += float(hi) * spins[i]
    for (i, j), v in model.couplings.items():
        diag += float(v) * (spins[i] * spins[j])
    diag.flags.writeable = False  # shared read-only across threads
    return diag


def penalty_diagonal(weights: Sequence[int], capacity: int, alpha: float, beta: float) -> np.ndarray:
    """Penalty form evaluated on all basis states straight from the subset sums."""
    excess = (subset_sums(weights) - capacity).astype(float)
    return alpha * excess + beta * excess * excess
