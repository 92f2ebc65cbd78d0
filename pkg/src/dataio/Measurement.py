import math
from dataclasses import dataclass, field
from itertools import product
from typing import Tuple

from src.shared.errors import ContractError
from src.shared.utils import strictly_increasing


@dataclass(frozen=True)
class MeasurementSample:
    """
    One impact record: where the end effector hit (d, h), how fast, and the peak transient force.

    Flags (e.g. "out_of_domain" on synthetic samples) are annotations only and do not take part
    in equality or serialization.
    """

    distance_m: float
    height_m: float
    velocity_mps: float
    force_n: float
    repetition: int = 1
    flags: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for name in ("distance_m", "height_m", "velocity_mps"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ContractError(f"{name} must be a positive finite number, got {value}")
        if not math.isfinite(self.force_n):
            raise ContractError(f"force_n must be finite, got {self.force_n}")
        if self.repetition < 1:
            raise ContractError(f"repetition must be >= 1, got {self.repetition}")

    @property
    def state(self):
        return (self.distance_m, self.height_m, self.velocity_mps)


@dataclass(frozen=True)
class MeasurementSet:
    """An ordered collection of samples sharing one dataset label."""

    samples: Tuple[MeasurementSample, ...]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def with_samples(self, samples):
        return MeasurementSet(samples=tuple(samples), label=self.label)

    def distances(self):
        return [s.distance_m for s in self.samples]

    def heights(self):
        return [s.height_m for s in self.samples]

    def velocities(self):
        return [s.velocity_mps for s in self.samples]

    def forces(self):
        return [s.force_n for s in self.samples]


@dataclass(frozen=True)
class GridSpec:
    """
    Levels of a measurement or evaluation grid.

    distances_m and heights_m are required; velocities_mps may be empty for (d, h) maps.
    """

    distances_m: Tuple[float, ...]
    heights_m: Tuple[float, ...]
    velocities_mps: Tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("distances_m", "heights_m", "velocities_mps"):
            levels = tuple(float(x) for x in getattr(self, name))
            object.__setattr__(self, name, levels)
            if not strictly_increasing(levels):
                raise ContractError(f"{name} must be strictly increasing")
        if not self.distances_m or not self.heights_m:
            raise ContractError("grid needs at least one distance and one height level")

    @property
    def has_velocity(self):
        return bool(self.velocities_mps)

    def positions(self):
        """(d, h) pairs in distance-major order."""
        return list(product(self.distances_m, self.heights_m))

    def states(self):
        """(d, h, v) triples in distance-major, then height, then velocity order."""
        if not self.has_velocity:
            raise ContractError("grid has no velocity axis")
        return list(product(self.distances_m, self.heights_m, self.velocities_mps))

    def cell_count(self):
        count = len(self.distances_m) * len(self.heights_m)
        return count * len(self.velocities_mps) if self.has_velocity else count
