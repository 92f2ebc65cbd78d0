import logging
import math

import numpy as np
import scipy.linalg

from src.mechanics.PlanarArm import DEFAULT_EE_ORIENTATION_RAD, DOWN, Elbow
from src.mechanics.dynamics import inertia_matrix
from src.mechanics.kinematics import ik_planar3, jacobian
from src.prediction.WorkspaceMap import EFFECTIVE_MASS_MAP, WorkspaceMap
from src.shared.config import INFINITE_MASS_THRESHOLD, INTERIOR_REACH_FRACTION, MAX_WORKERS
from src.shared.errors import ReachabilityError
from src.shared.parallel_execution import execute_in_parallel
from src.shared.utils import INFINITE_MASS

logger = logging.getLogger("default")


def inverse_effective_mass(arm, q, u, J=None):
    """u^T J M^-1 J^T u; J may be passed in to evaluate the form with another Jacobian."""
    J = jacobian(arm, q) if J is None else np.asarray(J, dtype=float)
    M = inertia_matrix(arm, q)
    Jt_u = J.T @ np.asarray(u.u)
    return float(Jt_u @ scipy.linalg.cho_solve(scipy.linalg.cho_factor(M), Jt_u))


def effective_mass(arm, q, u):
    """Reflected mass along u, or INFINITE_MASS when u is (numerically) in the null space of J^T."""
    form = inverse_effective_mass(arm, q, u)
    if form < INFINITE_MASS_THRESHOLD:
        return INFINITE_MASS
    return 1.0 / form


def wrist_distance(arm, d, h, ee_orientation=DEFAULT_EE_ORIENTATION_RAD):
    l3 = arm.link_lengths_m[-1]
    return math.hypot(d - l3 * math.cos(ee_orientation), h - l3 * math.sin(ee_orientation))


def is_interior(arm, d, h, ee_orientation=DEFAULT_EE_ORIENTATION_RAD, fraction=INTERIOR_REACH_FRACTION):
    """True when the wrist point is well inside the reach of the first two links."""
    l1, l2 = arm.link_lengths_m[0], arm.link_lengths_m[1]
    return wrist_distance(arm, d, h, ee_orientation) < fraction * (l1 + l2)


def _mass_cell(arm, d, h, u, ee_orientation, elbow):
    try:
        q = ik_planar3(arm, (d, h), ee_orientation, elbow)
    except ReachabilityError:
        return float("nan"), ("unreachable",)
    mass = effective_mass(arm, q, u)
    if mass is INFINITE_MASS:
        return math.inf, ("infinite",)
    return mass, ()


def _mass_row(arm, d, heights, u, ee_orientation, elbow):
    return [_mass_cell(arm, d, h, u, ee_orientation, elbow) for h in heights]


def effective_mass_map(
    arm,
    grid,
    u=DOWN,
    ee_orientation=DEFAULT_EE_ORIENTATION_RAD,
    elbow=Elbow.UP,
    max_workers=MAX_WORKERS,
):
    """
    Effective mass over a (d, h) grid, d along x and h along y of the arm's plane.

    Each cell is solved by inverse kinematics; unreachable cells are NaN with an "unreachable" flag.
    """
    elbow = Elbow(elbow)
    rows = execute_in_parallel(
        [(_mass_row, (arm, d, grid.heights_m, u, ee_orientation, elbow)) for d in grid.distances_m],
        max_workers=max_workers,
    )
    unreachable = sum(1 for row in rows for _, flags in row if "unreachable" in flags)
    if unreachable:
        logger.info(f"{unreachable} of {grid.cell_count()} cells are out of reach")
    return WorkspaceMap(
        grid,
        np.array([[value for value, _ in row] for row in rows], dtype=float),
        EFFECTIVE_MASS_MAP,
        tuple(tuple(flags for _, flags in row) for row in rows),
        {
            "inertia_model": arm.inertia_model.value,
            "elbow": elbow.value,
            "ee_orientation_rad": ee_orientation,
            "direction": f"{u.u[0]:.9g},{u.u[1]:.9g}",
        },
    )
