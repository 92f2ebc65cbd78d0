import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd

from src.dataio.Measurement import MeasurementSet
from src.shared.config import DEVICE_FORCE_LIMIT_N, STATE_TOLERANCE
from src.shared.errors import ContractError, EmptyDatasetError
from src.shared.utils import matches_level

logger = logging.getLogger("default")


@dataclass(frozen=True)
class FilterResult:
    kept: MeasurementSet
    removed_count: int


@dataclass(frozen=True)
class TrainTestSplit:
    train: MeasurementSet
    test: MeasurementSet
    warnings: Tuple[str, ...]


@dataclass(frozen=True)
class StateStatistics:
    """Repeatability of a dataset: one row per (d, h, v) state plus summary SDs."""

    per_state: pd.DataFrame
    mean_sd_n: float
    max_sd_n: float


def filter_valid_report(dataset, max_force_n=DEVICE_FORCE_LIMIT_N):
    """
    Drop samples above the measuring-device limit and report how many were dropped.

    A force exactly equal to the limit is kept: only samples that exceed it are discarded.
    """
    if not max_force_n > 0:
        raise ContractError(f"max_force_n must be positive, got {max_force_n}")
    kept = [s for s in dataset.samples if s.force_n <= max_force_n]
    removed = len(dataset) - len(kept)
    logger.info(
        f"[Dataset-{dataset.label}] removed {removed} of {len(dataset)} samples above {max_force_n} N"
    )
    if not kept:
        raise EmptyDatasetError(
            f"all {len(dataset)} samples of '{dataset.label}' exceed {max_force_n} N"
        )
    return FilterResult(dataset.with_samples(kept), removed)


def filter_valid(dataset, max_force_n=DEVICE_FORCE_LIMIT_N):
    return filter_valid_report(dataset, max_force_n).kept


def _in_grid(sample, grid, tolerance):
    return (
        matches_level(sample.distance_m, grid.distances_m, tolerance)
        and matches_level(sample.height_m, grid.heights_m, tolerance)
        and matches_level(sample.velocity_mps, grid.velocities_mps, tolerance)
    )


def split_train_test_report(dataset, train_grid, tolerance=STATE_TOLERANCE):
    """
    Partition samples into those on the training grid and everything else.

    Training-grid states with no matching sample are reported as warnings, not errors.
    """
    if tolerance < 0:
        raise ContractError("tolerance must be >= 0")
    if not train_grid.has_velocity:
        raise ContractError("training grid needs a velocity axis")

    train, test = [], []
    for sample in dataset.samples:
        (train if _in_grid(sample, train_grid, tolerance) else test).append(sample)

    warnings: List[str] = []
    for d, h, v in train_grid.states():
        hit = any(
            abs(s.distance_m - d) <= tolerance
            and abs(s.height_m - h) <= tolerance
            and abs(s.velocity_mps - v) <= tolerance
            for s in train
        )
        if not hit:
            warnings.append(f"training state (d={d}, h={h}, v={v}) matches no sample")
    for message in warnings:
        logger.warning(f"[Dataset-{dataset.label}] {message}")

    return TrainTestSplit(dataset.with_samples(train), dataset.with_samples(test), tuple(warnings))


def split_train_test(dataset, train_grid, tolerance=STATE_TOLERANCE):
    split = split_train_test_report(dataset, train_grid, tolerance)
    return split.train, split.test


def distinct_levels(values, tolerance=STATE_TOLERANCE):
    """Sorted representative levels; values closer than tolerance collapse onto the first seen."""
    levels = []
    for value in sorted(values):
        if not levels or value - levels[-1] > tolerance:
            levels.append(value)
    return levels


def slice_by_height(dataset, height_m, tolerance=STATE_TOLERANCE):
    return dataset.with_samples(s for s in dataset.samples if abs(s.height_m - height_m) <= tolerance)


def state_statistics(dataset):
    """Per-state mean, SD (ddof=1) and count of repeated measurements."""
    frame = pd.DataFrame(
        {
            "distance_m": dataset.distances(),
            "height_m": dataset.heights(),
            "velocity_mps": dataset.velocities(),
            "force_n": dataset.forces(),
        }
    )
    per_state = (
        frame.groupby(["distance_m", "height_m", "velocity_mps"], sort=True)["force_n"]
        .agg(["mean", "std", "count"])
        .reset_index()
    )
    repeated = per_state[per_state["count"] > 1]["std"]
    mean_sd = float(repeated.mean()) if len(repeated) else 0.0
    max_sd = float(repeated.max()) if len(repeated) else 0.0
    return StateStatistics(per_state, mean_sd if np.isfinite(mean_sd) else 0.0, max_sd)
