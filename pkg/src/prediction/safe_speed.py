import logging
import math
from dataclasses import dataclass

import numpy as np

from src.shared.config import DEFAULT_MARGIN_FACTOR, FORCE_LIMIT_QUASI_STATIC_N, QUADRATIC_EPS
from src.shared.errors import ContractError, InfeasibleSpeedError, VelocityIndependentModelError

logger = logging.getLogger("default")
debugger = logging.getLogger("debugger")


@dataclass(frozen=True)
class SafetyQuery:
    distance_m: float
    height_m: float
    force_limit_n: float = FORCE_LIMIT_QUASI_STATIC_N
    margin_factor: float = DEFAULT_MARGIN_FACTOR

    def __post_init__(self):
        if not (math.isfinite(self.force_limit_n) and self.force_limit_n > 0):
            raise ContractError(f"force_limit_n must be positive, got {self.force_limit_n}")
        if not (math.isfinite(self.margin_factor) and self.margin_factor >= 1):
            raise ContractError(f"margin_factor must be >= 1, got {self.margin_factor}")
        if not (math.isfinite(self.distance_m) and math.isfinite(self.height_m)):
            raise ContractError("query position must be finite")

    def at(self, distance_m, height_m):
        return SafetyQuery(distance_m, height_m, self.force_limit_n, self.margin_factor)

    @property
    def target_force_n(self):
        return self.force_limit_n / self.margin_factor


@dataclass(frozen=True)
class SafeSpeedResult:
    """
    Highest speed whose margined force prediction stays within the limit.

    clamped: the crossing lies above the model's velocity range (or does not exist) and the
    range maximum was returned. extrapolated: the crossing lies below the training range.
    """

    velocity_mps: float
    clamped: bool = False
    extrapolated: bool = False


@dataclass(frozen=True)
class ForcePrediction:
    force_n: float
    in_domain: bool


def _check_finite(*values):
    if not all(math.isfinite(x) for x in values):
        raise ContractError(f"state must be finite, got {values}")


def predict_force(model, d, h, v):
    """F = exp(linear predictor) in newtons."""
    return evaluate_force(model, d, h, v).force_n


def evaluate_force(model, d, h, v):
    """Force prediction plus whether (d, h, v) lies inside the model's training box."""
    _check_finite(d, h, v)
    inside = model.in_domain(d, h, v)
    if not inside:
        debugger.debug(f"[{model.label}] extrapolating at d={d}, h={h}, v={v}")
    return ForcePrediction(math.exp(model.linear_predictor(d, h, v)), inside)


def velocity_polynomial(model, d, h):
    """
    Coefficients (A, B, C) with ln F = A + B*v + C*v^2 at a fixed position.

    Raises ContractError when a term has velocity degree above two.
    """
    A = B = C = 0.0
    for term, beta in model.active_terms():
        if term.velocity_degree > 2:
            raise ContractError(f"term {term.name} has velocity degree {term.velocity_degree} > 2")
        position_part = beta * d**term.exp_d * h**term.exp_h
        if term.velocity_degree == 0:
            A += position_part
        elif term.velocity_degree == 1:
            B += position_part
        else:
            C += position_part
    return A, B, C


def velocity_sensitivity(model, d, h, v):
    """d lnF / dv at (d, h, v)."""
    total = 0.0
    for term, beta in model.active_terms():
        if term.exp_v:
            total += beta * term.exp_v * d**term.exp_d * h**term.exp_h * v ** (term.exp_v - 1)
    return total


def check_velocity_monotone(model, points=7):
    """
    True when d lnF / dv > 0 over a points^3 scan of the model's domain box.

    This is the validity condition for picking the smallest positive root in max_safe_velocity.
    """
    box = model.domain
    if box is None:
        raise ContractError(f"model '{model.label}' has no domain to scan")
    axes = [
        np.linspace(box.d_min, box.d_max, points),
        np.linspace(box.h_min, box.h_max, points),
        np.linspace(box.v_min, box.v_max, points),
    ]
    for d in axes[0]:
        for h in axes[1]:
            for v in axes[2]:
                if velocity_sensitivity(model, d, h, v) <= 0:
                    logger.warning(
                        f"[{model.label}] force does not increase with speed at d={d:.4g}, h={h:.4g}, v={v:.4g}"
                    )
                    return False
    return True


def _smallest_positive_root(A, B, C, target):
    """Smallest v > 0 with C v^2 + B v + (A - target) = 0, or None."""
    c0 = A - target
    if abs(C) < QUADRATIC_EPS:
        return -c0 / B if B > 0 else None
    disc = B * B - 4.0 * C * c0
    if disc < 0:
        return None
    # numerically stable pair of roots
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    roots = [r for r in (q / C, c0 / q if q != 0 else None) if r is not None and r > 0]
    return min(roots) if roots else None


def max_safe_velocity(model, query, v_max=None):
    """
    Largest speed v with margin_factor * predict_force(model, d, h, v) <= force_limit_n.

    Solves the quadratic in v of the log-linear model and keeps the smallest positive root.
    The result is capped at v_max (default: the model's highest training speed).
    """
    d, h = query.distance_m, query.height_m
    A, B, C = velocity_polynomial(model, d, h)
    if abs(B) < QUADRATIC_EPS and abs(C) < QUADRATIC_EPS:
        raise VelocityIndependentModelError(f"model '{model.label}' does not depend on velocity at d={d}, h={h}")
    target = math.log(query.target_force_n)
    if A - target >= 0:
        raise InfeasibleSpeedError(
            f"predicted force at d={d}, h={h} exceeds {query.target_force_n:.6g} N even as v -> 0"
        )

    if v_max is None and model.domain is not None:
        v_max = model.domain.v_max
    root = _smallest_positive_root(A, B, C, target)

    if root is None or (v_max is not None and root > v_max):
        if v_max is None:
            logger.warning(f"[{model.label}] force limit is never reached at d={d}, h={h}")
            return SafeSpeedResult(math.inf, clamped=False)
        debugger.debug(f"[{model.label}] safe speed at d={d}, h={h} clamped to {v_max} m/s")
        return SafeSpeedResult(float(v_max), clamped=True)

    extrapolated = model.domain is not None and root < model.domain.v_min
    if extrapolated:
        debugger.debug(f"[{model.label}] safe speed {root:.6g} m/s lies below the training speeds")
    if velocity_sensitivity(model, d, h, root) <= 0:
        logger.warning(f"[{model.label}] root at d={d}, h={h} lies on a force-decreasing branch")
    return SafeSpeedResult(float(root), clamped=False, extrapolated=extrapolated)
