"""Bin packing instances: generation from the three weight distributions and JSON persistence."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class InstanceValidationError(ValueError):
    """An instance (or instance file) violates one of the schema invariants."""


class Distribution(str, enum.Enum):
    SINGLE_GAUSSIAN = "gauss1"
    DOUBLE_GAUSSIAN = "gauss2"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, value: "str | Distribution") -> "Distribution":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "gauss1": cls.SINGLE_GAUSSIAN,
            "1g": cls.SINGLE_GAUSSIAN,
            "singlegaussian": cls.SINGLE_GAUSSIAN,
            "single_gaussian": cls.SINGLE_GAUSSIAN,
            "gauss2": cls.DOUBLE_GAUSSIAN,
            "2g": cls.DOUBLE_GAUSSIAN,
            "doublegaussian": cls.DOUBLE_GAUSSIAN,
            "double_gaussian": cls.DOUBLE_GAUSSIAN,
            "uniform": cls.UNIFORM,
            "u": cls.UNIFORM,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown distribution {value!r}") from None

    @property
    def tag(self) -> str:
        """Short tag used in instance names (``10_100_2G`` style)."""
        return {"gauss1": "1G", "gauss2": "2G", "uniform": "U"}[self.value]


@dataclass(frozen=True)
class DistributionSpec:
    """Weight distribution with its parameters expressed as fractions of the capacity.

    Single Gaussian: mean C/2, std C/6. Double Gaussian: equal mixture of
    means C/3 and 2C/3, each with std C/9. Uniform: integers 1..C.
    """

    kind: Distribution
    single_std: float = 1 / 6
    double_means: tuple[float, float] = (1 / 3, 2 / 3)
    double_std: float = 1 / 9

    def __post_init__(self):
        object.__setattr__(self, "kind", Distribution.parse(self.kind))

    def sample(self, rng: np.random.Generator, n: int, capacity: int) -> list[int]:
        if self.kind is Distribution.UNIFORM:
            return [int(v) for v in rng.integers(1, capacity + 1, size=n)]
        out: list[int] = []
        # rejection keeps the shape of the distribution; clamping would pile mass on 1 and C
        while len(out) < n:
            batch = max(2 * (n - len(out)), 8)
            if self.kind is Distribution.SINGLE_GAUSSIAN:
                draws = rng.normal(capacity / 2, capacity * self.single_std, size=batch)
            else:
                means = np.asarray(self.double_means)[rng.integers(0, 2, size=batch)]
                draws = rng.normal(capacity * means, capacity * self.double_std)
            values = np.rint(draws)
            for v in values[(values >= 1) & (values <= capacity)]:
                out.append(int(v))
                if len(out) == n:
                    break
        return out


@dataclass(frozen=True)
class Instance:
    name: str
    capacity: int
    weights: tuple[int, ...]
    distribution: Distribution = Distribution.UNIFORM
    seed: int = 0
    num_items: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "distribution", Distribution.parse(self.distribution))
        if self.num_items == -1:
            object.__setattr__(self, "num_items", len(self.weights))
        self.validate()

    def validate(self) -> None:
        if self.num_items < 1:
            raise InstanceValidationError("num_items must be >= 1")
        if self.capacity < 1:
            raise InstanceValidationError("capacity must be >= 1")
        if len(self.weights) != self.num_items:
            raise InstanceValidationError(
                f"weights has {len(self.weights)} entries but num_items={self.num_items}"
            )
        for i, w in enumerate(self.weights, start=1):
            if not 1 <= w <= self.capacity:
                raise InstanceValidationError(
                    f"weight w_{i}={w} outside [1, capacity={self.capacity}]"
                )
        if not 0 <= self.seed < 2**64:
            raise InstanceValidationError("seed must be a 64-bit unsigned integer")

    @property
    def n(self) -> int:
        return self.num_items

    def subset_weight(self, items) -> int:
        """Total weight of a collection of 1-based item indices."""
        return sum(self.weights[i - 1] for i in items)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "num_items": self.num_items,
            "capacity": self.capacity,
            "weights": list(self.weights),
            "distribution": self.distribution.value,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        required = ("name", "num_items", "capacity", "weights", "distribution", "seed")
        missing = [k for k in required if k not in data]
        if missing:
            raise InstanceValidationError(f"missing keys: {', '.join(missing)}")
        for key in ("num_items", "capacity", "seed"):
            if not isinstance(data[key], int) or isinstance(data[key], bool):
                raise InstanceValidationError(f"{key} must be an integer")
        weights = data["weights"]
        if not isinstance(weights, list) or not all(
            isinstance(w, int) and not isinstance(w, bool) for w in weights
        ):
            raise InstanceValidationError("weights must be an array of integers")
        try:
            dist = Distribution.parse(data["distribution"])
        except ValueError as exc:
            raise InstanceValidationError(str(exc)) from None
        return cls(
            name=str(data["name"]),
            num_items=data["num_items"],
            capacity=data["capacity"],
            weights=tuple(weights),
            distribution=dist,
            seed=data["seed"],
        )


def generate_instance(
    n: int,
    capacity: int,
    dist: "DistributionSpec | Distribution | str",
    seed: int,
    name: str | None = None,
) -> Instance:
    """Draw ``n`` integer weights in ``[1, capacity]``; deterministic in all arguments."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    if not isinstance(dist, DistributionSpec):
        dist = DistributionSpec(Distribution.parse(dist))
    rng = np.random.default_rng(seed)
    weights = dist.sample(rng, n, capacity)
    if name is None:
        name = f"{n}_{capacity}_{dist.kind.tag}"
    return Instance(
        name=name,
        capacity=capacity,
        weights=tuple(weights),
        distribution=dist.kind,
        seed=seed,
    )


def save_instance(instance: Instance, path) -> None:
    path = Path(path)
    path.write_text(json.dumps(instance.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_instance(path) -> Instance:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceValidationError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InstanceValidationError(f"{path}: expected a JSON object")
    try:
        return Instance.from_dict(data)
    except InstanceValidationError as exc:
        raise InstanceValidationError(f"{path}: {exc}") from None
