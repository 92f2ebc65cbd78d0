import logging

import numpy as np

from src.prediction.WorkspaceMap import FORCE_MAP, SPEED_MAP, WorkspaceMap
from src.prediction.safe_speed import check_velocity_monotone, max_safe_velocity, velocity_polynomial
from src.shared.config import MAX_WORKERS
from src.shared.errors import InfeasibleSpeedError, VelocityIndependentModelError
from src.shared.parallel_execution import execute_in_parallel

logger = logging.getLogger("default")


def force_map(model, grid, v):
    """predict_force at each (d, h) of the grid for a fixed speed v."""
    d, h = np.meshgrid(grid.distances_m, grid.heights_m, indexing="ij")
    values = np.exp(model.linear_predictor(d, h, np.full(d.shape, float(v))))
    flags = tuple(
        tuple(() if model.in_domain(di, hj, v) else ("out_of_domain",) for hj in grid.heights_m)
        for di in grid.distances_m
    )
    return WorkspaceMap(grid, values, FORCE_MAP, flags, {"model": model.label, "velocity_mps": v})


def _speed_cell(model, query, d, h):
    try:
        result = max_safe_velocity(model, query.at(d, h))
    except (InfeasibleSpeedError, VelocityIndependentModelError) as e:
        # infeasible or velocity-independent cells become sentinels
        logger.debug(f"[{model.label}] no safe speed at d={d}, h={h}: {e}")
        return float("nan"), ("unsafe",)
    flags = ()
    if result.clamped:
        flags += ("clamped",)
    if result.extrapolated:
        flags += ("extrapolated",)
    return result.velocity_mps, flags


def _speed_row(model, query, d, heights):
    return [_speed_cell(model, query, d, h) for h in heights]


def speed_map(model, grid, query, max_workers=MAX_WORKERS):
    """
    max_safe_velocity at each (d, h) cell; the query supplies limit and margin.

    Cells where the limit is exceeded already as v -> 0 carry NaN and the "unsafe" flag.
    Raises ContractError up front when the model is not quadratic in v.
    """
    velocity_polynomial(model, grid.distances_m[0], grid.heights_m[0])
    if model.domain is not None:
        check_velocity_monotone(model)
    rows = execute_in_parallel(
        [(_speed_row, (model, query, d, grid.heights_m)) for d in grid.distances_m],
        max_workers=max_workers,
    )
    values = [[value for value, _ in row] for row in rows]
    flags = tuple(tuple(cell_flags for _, cell_flags in row) for row in rows)
    unsafe = sum(cell.count("unsafe") for row in flags for cell in row)
    if unsafe:
        logger.warning(f"[{model.label}] {unsafe} of {grid.cell_count()} cells are unsafe at any speed")
    return WorkspaceMap(
        grid,
        np.array(values, dtype=float),
        SPEED_MAP,
        flags,
        {
            "model": model.label,
            "force_limit_n": query.force_limit_n,
            "margin_factor": query.margin_factor,
        },
    )
