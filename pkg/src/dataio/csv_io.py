import io
import logging
import math
import re
from pathlib import Path

import pandas as pd

from src.dataio.Measurement import MeasurementSample, MeasurementSet
from src.shared.errors import (
    ContractError,
    DatasetParseError,
    EmptyDatasetError,
)

COLUMNS = ["label", "distance_m", "height_m", "velocity_mps", "force_n", "repetition"]
TRACE_COLUMNS = ["time_s", "force_n"]

logger = logging.getLogger("default")


def _read_text(source):
    text = source.read() if hasattr(source, "read") else str(source)
    return text.lstrip("\ufeff")


def _read_frame(text, columns):
    """
    Read CSV text as strings.

    Returns (rows, line_numbers) where line_numbers[i] is the physical line of data row i.
    The header line is validated against columns.
    """
    if not text.strip():
        raise EmptyDatasetError("dataset is empty")
    try:
        # header=None: the column count is fixed by the header line, longer rows raise
        frame = pd.read_csv(
            io.StringIO(text),
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line_number = int(match.group(1)) if match else None
        raise DatasetParseError("wrong column count", line_number) from e
    except pd.errors.EmptyDataError as e:
        raise EmptyDatasetError("dataset is empty") from e

    header = [str(c).strip() for c in frame.iloc[0]]
    if header != columns:
        raise DatasetParseError(
            f"header must be {','.join(columns)}, got {','.join(header)}", 1
        )
    rows = list(frame.iloc[1:].itertuples(index=False, name=None))
    return rows, [int(i) + 1 for i in frame.index[1:]]


def _is_missing(value):
    return isinstance(value, float) and math.isnan(value)


def _is_blank(row):
    return all(_is_missing(x) or str(x).strip() == "" for x in row)


def _parse_float(text, column, line_number):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DatasetParseError(f"{column} is not numeric: {text!r}", line_number)
    if not math.isfinite(value):
        raise DatasetParseError(f"{column} is not finite: {text!r}", line_number)
    return value


def _parse_rows(text):
    """Yield (label, MeasurementSample) pairs in file order."""
    rows, line_numbers = _read_frame(text, COLUMNS)
    for row, line_number in zip(rows, line_numbers):
        if _is_blank(row):
            continue
        if any(_is_missing(x) for x in row):
            raise DatasetParseError(f"expected {len(COLUMNS)} columns", line_number)
        label = str(row[0]).strip()
        values = [
            _parse_float(str(x).strip(), column, line_number)
            for x, column in zip(row[1:5], COLUMNS[1:5])
        ]
        rep_text = str(row[5]).strip()
        repetition = _parse_float(rep_text, "repetition", line_number)
        if repetition != int(repetition):
            raise DatasetParseError(f"repetition is not an integer: {rep_text!r}", line_number)
        if min(values) <= 0:
            raise DatasetParseError(
                "distance, height, velocity and force must be positive", line_number
            )
        try:
            sample = MeasurementSample(*values, repetition=int(repetition))
        except ContractError as e:
            raise DatasetParseError(str(e), line_number) from e
        yield label, sample


def parse_datasets(source):
    """
    Parse a CSV stream that may hold several labels into one MeasurementSet per label.

    Labels keep their order of first appearance, samples keep file order.
    """
    grouped = {}
    for label, sample in _parse_rows(_read_text(source)):
        grouped.setdefault(label, []).append(sample)
    if not grouped:
        raise EmptyDatasetError("dataset has a header but no rows")
    return {label: MeasurementSet(tuple(samples), label) for label, samples in grouped.items()}


def parse_dataset(source):
    """Parse a single-label CSV stream into a MeasurementSet."""
    datasets = parse_datasets(source)
    if len(datasets) > 1:
        raise ContractError(
            f"file holds {len(datasets)} labels ({', '.join(datasets)}); use parse_datasets"
        )
    return next(iter(datasets.values()))


def serialize_dataset(dataset):
    """Render a MeasurementSet as CSV text that parses back to an identical set."""
    frame = pd.DataFrame(
        [
            (dataset.label, s.distance_m, s.height_m, s.velocity_mps, s.force_n, s.repetition)
            for s in dataset.samples
        ],
        columns=COLUMNS,
    )
    return frame.to_csv(index=False, lineterminator="\n")


def _read_file_text(path):
    try:
        with open(Path(path), "r", encoding="utf-8-sig", newline="") as handle:
            return handle.read()
    except UnicodeDecodeError as e:
        raise DatasetParseError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}") from e


def read_dataset_file(path):
    return parse_datasets(_read_file_text(path))


def write_dataset_file(datasets, path):
    """Write one or several MeasurementSets into a single CSV file."""
    if isinstance(datasets, MeasurementSet):
        datasets = [datasets]
    Path(path).write_text(serialize_datasets(datasets), encoding="utf-8")
    logger.info(f"Wrote {sum(len(ds) for ds in datasets)} samples to {path}")


def serialize_datasets(datasets):
    chunks = [serialize_dataset(ds) for ds in datasets]
    return chunks[0] + "".join(c.split("\n", 1)[1] for c in chunks[1:])


def read_trace_file(path):
    """Read a `time_s,force_n` CSV into two float lists."""
    rows, line_numbers = _read_frame(_read_text(_read_file_text(path)), TRACE_COLUMNS)
    times, forces = [], []
    for row, line_number in zip(rows, line_numbers):
        if _is_blank(row):
            continue
        if any(_is_missing(x) for x in row):
            raise DatasetParseError(f"expected {len(TRACE_COLUMNS)} columns", line_number)
        times.append(_parse_float(str(row[0]).strip(), "time_s", line_number))
        forces.append(_parse_float(str(row[1]).strip(), "force_n", line_number))
    return times, forces
