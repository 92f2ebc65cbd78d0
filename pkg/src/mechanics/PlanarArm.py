import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Tuple

from src.shared.errors import ContractError, ModelFormatError


class InertiaModel(Enum):
    UNIFORM_ROD = "uniform-rod"
    POINT_MASS = "point-mass-at-tip"


class Elbow(Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class PlanarArm:
    """
    Serial planar manipulator with revolute joints and rigid links.

    A uniform rod has its COM at mid-length and inertia m*l^2/12 about it;
    a point mass sits at the link tip with no rotational inertia.
    """

    link_lengths_m: Tuple[float, ...]
    link_masses_kg: Tuple[float, ...]
    inertia_model: InertiaModel = InertiaModel.UNIFORM_ROD

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.link_lengths_m)
        masses = tuple(float(x) for x in self.link_masses_kg)
        object.__setattr__(self, "link_lengths_m", lengths)
        object.__setattr__(self, "link_masses_kg", masses)
        object.__setattr__(self, "inertia_model", InertiaModel(self.inertia_model))
        if not lengths or len(lengths) != len(masses):
            raise ContractError("an arm needs equally many (>= 1) link lengths and masses")
        if any(not (math.isfinite(x) and x > 0) for x in lengths + masses):
            raise ContractError("link lengths and masses must be positive")

    @property
    def n_links(self):
        return len(self.link_lengths_m)

    @property
    def reach_m(self):
        return sum(self.link_lengths_m)

    @property
    def com_fraction(self):
        return 0.5 if self.inertia_model is InertiaModel.UNIFORM_ROD else 1.0

    def link_inertia(self, i):
        """Rotational inertia of link i about its COM (kg m^2)."""
        if self.inertia_model is InertiaModel.POINT_MASS:
            return 0.0
        return self.link_masses_kg[i] * self.link_lengths_m[i] ** 2 / 12.0

    def with_inertia_model(self, inertia_model):
        return PlanarArm(self.link_lengths_m, self.link_masses_kg, inertia_model)


@dataclass(frozen=True)
class JointConfig:
    angles_rad: Tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(x) for x in self.angles_rad)
        if not all(math.isfinite(x) for x in angles):
            raise ContractError("joint angles must be finite")
        object.__setattr__(self, "angles_rad", angles)

    def check(self, arm):
        if len(self.angles_rad) != arm.n_links:
            raise ContractError(f"{len(self.angles_rad)} joint angles for a {arm.n_links}-link arm")
        return self


@dataclass(frozen=True)
class ImpactDirection:
    u: Tuple[float, float]

    def __post_init__(self):
        u = tuple(float(x) for x in self.u)
        if len(u) != 2 or abs(math.hypot(*u) - 1.0) > 1e-12:
            raise ContractError(f"impact direction must be a unit 2-vector, got {u}")
        object.__setattr__(self, "u", u)

    @classmethod
    def normalized(cls, x, y):
        norm = math.hypot(x, y)
        if norm == 0:
            raise ContractError("impact direction cannot be the zero vector")
        return cls((x / norm, y / norm))


DOWN = ImpactDirection((0.0, -1.0))
DEFAULT_EE_ORIENTATION_RAD = -math.pi / 2

# three-link approximation of the collaborative arms
DEFAULT_ARM = PlanarArm((0.5, 0.45, 0.05), (13.0, 4.0, 4.0), InertiaModel.UNIFORM_ROD)


def arm_to_dict(arm):
    return {
        "link_lengths_m": list(arm.link_lengths_m),
        "link_masses_kg": list(arm.link_masses_kg),
        "inertia_model": arm.inertia_model.value,
    }


def arm_from_dict(document):
    try:
        return PlanarArm(
            tuple(document["link_lengths_m"]),
            tuple(document["link_masses_kg"]),
            InertiaModel(document.get("inertia_model", InertiaModel.UNIFORM_ROD.value)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"malformed arm description: {e}") from e


def save_arm(arm, path):
    Path(path).write_text(json.dumps(arm_to_dict(arm), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_arm(path):
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"arm file is not valid JSON: {e}") from e
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"arm file is not UTF-8 text: {e.reason}") from e
    if not isinstance(document, dict):
        raise ModelFormatError("arm description must be a JSON object")
    return arm_from_dict(document)
