import math
from dataclasses import dataclass
from typing import Union

from src.shared.config import (
    FORCE_LIMIT_QUASI_STATIC_N,
    FORCE_LIMIT_TRANSIENT_N,
    HAND_SPRING_CONSTANT_NPM,
)
from src.shared.errors import ContractError
from src.shared.utils import INFINITE_MASS, inverse_mass, is_infinite_mass

TS15066_DEFAULTS = {
    "f_max_quasi_static_n": FORCE_LIMIT_QUASI_STATIC_N,
    "f_max_transient_n": FORCE_LIMIT_TRANSIENT_N,
    "k_spring_npm": HAND_SPRING_CONSTANT_NPM,
}

# moving masses of the two robots, kg; the baseline CLI presets
ROBOT_MOVING_MASS_KG = {"ur10e": 30.0, "kuka": 20.0}


@dataclass(frozen=True)
class PFLParams:
    """Two-body spring model parameters. m_human_kg may be INFINITE_MASS (constrained contact)."""

    f_max_n: float
    m_robot_kg: float
    k_spring_npm: float = HAND_SPRING_CONSTANT_NPM
    m_human_kg: Union[float, object] = INFINITE_MASS

    def __post_init__(self):
        for name in ("f_max_n", "k_spring_npm", "m_robot_kg"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ContractError(f"{name} must be positive, got {value}")
        if not is_infinite_mass(self.m_human_kg) and not (
            math.isfinite(self.m_human_kg) and self.m_human_kg > 0
        ):
            raise ContractError(f"m_human_kg must be positive or INFINITE_MASS, got {self.m_human_kg}")

    @property
    def inverse_reduced_mass(self):
        return 1.0 / self.m_robot_kg + inverse_mass(self.m_human_kg)


def pfl_max_velocity(params):
    """v = F / sqrt(k) * sqrt(1/m_R + 1/m_H)."""
    return params.f_max_n / math.sqrt(params.k_spring_npm) * math.sqrt(params.inverse_reduced_mass)


def pfl_force(v, params):
    """Impact force at speed v; inverse of pfl_max_velocity. f_max_n is not used."""
    if not (math.isfinite(v) and v >= 0):
        raise ContractError(f"velocity must be >= 0, got {v}")
    return v * math.sqrt(params.k_spring_npm) / math.sqrt(params.inverse_reduced_mass)


def contact_force_limit(contact):
    """Permissible force for 'quasi-static' or 'transient' contact."""
    key = f"f_max_{contact.replace('-', '_')}_n"
    if key not in TS15066_DEFAULTS:
        raise ContractError(f"unknown contact type {contact!r}, use quasi-static or transient")
    return TS15066_DEFAULTS[key]


def effective_mass_ts15066(moving_mass_kg, payload_kg=0.0):
    """m_R = M/2 + m_L."""
    if moving_mass_kg < 0 or payload_kg < 0:
        raise ContractError("masses must be >= 0")
    return moving_mass_kg / 2.0 + payload_kg


def robot_params(
    robot,
    f_max_n=FORCE_LIMIT_QUASI_STATIC_N,
    payload_kg=0.0,
    k_spring_npm=HAND_SPRING_CONSTANT_NPM,
    m_human_kg=INFINITE_MASS,
):
    """PFLParams for one of the named robots; the default hand is infinitely heavy (clamped)."""
    if robot not in ROBOT_MOVING_MASS_KG:
        raise ContractError(f"unknown robot {robot!r}, choose from {', '.join(ROBOT_MOVING_MASS_KG)}")
    m_r = effective_mass_ts15066(ROBOT_MOVING_MASS_KG[robot], payload_kg)
    return PFLParams(f_max_n, m_r, k_spring_npm, m_human_kg)


def pfl_force_predictor(params):
    """Force predictor over (d, h, v) for model comparisons; independent of position."""

    def predict(d, h, v):
        return pfl_force(v, params)

    predict.__name__ = "pfl"
    return predict
