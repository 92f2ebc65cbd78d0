import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from src.dataio.Measurement import GridSpec
from src.shared.errors import ContractError
from src.shared.utils import format_number

FORCE_MAP = "force-map"
SPEED_MAP = "speed-map"
EFFECTIVE_MASS_MAP = "effective-mass-map"
MAP_KINDS = (FORCE_MAP, SPEED_MAP, EFFECTIVE_MASS_MAP)

# cells carrying one of these print the flag instead of a number
SENTINEL_FLAGS = ("unsafe", "unreachable")


@dataclass(frozen=True)
class WorkspaceMap:
    """
    Scalar value per (d, h) cell of a grid.

    values has shape (len(distances), len(heights)); sentinel cells hold NaN and carry an
    "unsafe" or "unreachable" flag. flags[i][j] is a tuple of strings for cell (i, j).
    """

    grid: GridSpec
    values: np.ndarray
    kind: str
    flags: Tuple[Tuple[Tuple[str, ...], ...], ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        shape = (len(self.grid.distances_m), len(self.grid.heights_m))
        if values.shape != shape:
            raise ContractError(f"map values have shape {values.shape}, grid needs {shape}")
        if self.kind not in MAP_KINDS:
            raise ContractError(f"unknown map kind {self.kind!r}")
        flags = self.flags or tuple(tuple(() for _ in range(shape[1])) for _ in range(shape[0]))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "flags", tuple(tuple(tuple(c) for c in row) for row in flags))
        if self.kind == SPEED_MAP and np.any(values[~np.isnan(values)] < 0):
            raise ContractError("speed-map values must be >= 0")

    @property
    def shape(self):
        return self.values.shape

    def cells(self):
        """(d, h, value, flags) per cell in distance-major order."""
        for i, d in enumerate(self.grid.distances_m):
            for j, h in enumerate(self.grid.heights_m):
                yield d, h, float(self.values[i, j]), self.flags[i][j]

    def value_at(self, d, h, tolerance=1e-9):
        for cd, ch, value, _ in self.cells():
            if abs(cd - d) <= tolerance and abs(ch - h) <= tolerance:
                return value
        raise ContractError(f"({d}, {h}) is not a cell of this map")

    def sentinel_mask(self):
        return np.array(
            [[any(f in SENTINEL_FLAGS for f in cell) for cell in row] for row in self.flags],
            dtype=bool,
        ).reshape(self.shape)

    def to_frame(self):
        """pandas DataFrame with columns d_m, h_m, value, flags."""
        return pd.DataFrame(
            [(d, h, value, ";".join(flags)) for d, h, value, flags in self.cells()],
            columns=["d_m", "h_m", "value", "flags"],
        )


def map_to_frame(workspace_map):
    return workspace_map.to_frame()


def _render_value(value, flags):
    for sentinel in SENTINEL_FLAGS:
        if sentinel in flags:
            return sentinel
    return "nan" if math.isnan(value) else format_number(value)


def map_to_csv(workspace_map):
    """One row per cell, d-major; numbers at 9 significant digits."""
    frame = pd.DataFrame(
        [
            (format_number(d), format_number(h), _render_value(value, flags), ";".join(flags))
            for d, h, value, flags in workspace_map.cells()
        ],
        columns=["d_m", "h_m", "value", "flags"],
    )
    return frame.to_csv(index=False, lineterminator="\n")


def _render_metadata(value):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        return str(value)
    return format_number(value)


def map_to_grid_text(workspace_map):
    """
    Structured text grid: comment header, then one row per height level (ascending),
    one column per distance level.
    """
    grid = workspace_map.grid
    lines = [
        f"# kind: {workspace_map.kind}",
        f"# d_levels: {' '.join(format_number(d) for d in grid.distances_m)}",
        f"# h_levels: {' '.join(format_number(h) for h in grid.heights_m)}",
    ]
    for key in sorted(workspace_map.metadata):
        lines.append(f"# {key}: {_render_metadata(workspace_map.metadata[key])}")
    for j in range(len(grid.heights_m)):
        row = [
            _render_value(workspace_map.values[i, j], workspace_map.flags[i][j])
            for i in range(len(grid.distances_m))
        ]
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def render_map(workspace_map, fmt="csv"):
    if fmt == "csv":
        return map_to_csv(workspace_map)
    if fmt == "grid":
        return map_to_grid_text(workspace_map)
    raise ContractError(f"unknown map format {fmt!r}, use csv or grid")


def write_map(workspace_map, path, fmt="csv"):
    Path(path).write_text(render_map(workspace_map, fmt), encoding="utf-8")
