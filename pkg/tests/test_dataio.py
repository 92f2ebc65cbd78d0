import io
import math

import numpy as np
import pytest

from src.dataio.Measurement import GridSpec, MeasurementSample, MeasurementSet
from src.dataio.csv_io import (
    parse_dataset,
    parse_datasets,
    read_dataset_file,
    read_trace_file,
    serialize_dataset,
    write_dataset_file,
)
from src.dataio.grids import (
    UR10E_FULL_GRID,
    UR10E_OMITTED_POSITIONS,
    UR10E_TRAIN_GRID,
)
from src.dataio.preprocessing import (
    distinct_levels,
    filter_valid,
    filter_valid_report,
    slice_by_height,
    split_train_test,
    split_train_test_report,
    state_statistics,
)
from src.dataio.synthesis import OUT_OF_DOMAIN, synthesize_dataset
from src.shared.errors import ContractError, DatasetParseError, EmptyDatasetError

HEADER = "label,distance_m,height_m,velocity_mps,force_n,repetition\n"

# --------------------------- Parsing --------------------------- #


def test_parse_single_row():
    dataset = parse_dataset(io.StringIO(HEADER + "ur10e,0.52,0.14,0.20,150.0,1\n"))
    assert len(dataset) == 1
    assert dataset.label == "ur10e"
    assert dataset.samples[0] == MeasurementSample(0.52, 0.14, 0.20, 150.0, 1)


def test_parse_header_only_is_empty():
    with pytest.raises(EmptyDatasetError):
        parse_dataset(io.StringIO(HEADER))


def test_parse_empty_stream():
    with pytest.raises(EmptyDatasetError):
        parse_dataset(io.StringIO(""))


def test_parse_non_numeric_force_names_line():
    text = HEADER + "ur10e,0.52,0.14,0.20,150.0,1\nur10e,0.52,0.14,0.25,abc,1\n"
    with pytest.raises(DatasetParseError) as excinfo:
        parse_dataset(io.StringIO(text))
    assert excinfo.value.line_number == 3
    assert "line 3" in str(excinfo.value)


@pytest.mark.parametrize(
    "row, line",
    [
        ("ur10e,0.52,0.14,0.20,150.0\n", 2),
        ("ur10e,0.52,0.14,0.20,150.0,1,7\n", 2),
    ],
)
def test_parse_wrong_column_count(row, line):
    with pytest.raises(DatasetParseError) as excinfo:
        parse_dataset(io.StringIO(HEADER + row))
    assert excinfo.value.line_number == line


def test_parse_rejects_bad_header():
    with pytest.raises(DatasetParseError):
        parse_dataset(io.StringIO("a,b,c,d,e,f\nur10e,0.52,0.14,0.20,150.0,1\n"))


def test_parse_accepts_crlf_and_keeps_order():
    text = HEADER.replace("\n", "\r\n") + "ur10e,0.70,0.14,0.20,150.0,1\r\nur10e,0.52,0.14,0.20,160.0,2\r\n"
    dataset = parse_dataset(io.StringIO(text))
    assert [s.distance_m for s in dataset] == [0.70, 0.52]
    assert [s.repetition for s in dataset] == [1, 2]


def test_parse_datasets_splits_labels():
    text = HEADER + "a,0.52,0.14,0.20,150.0,1\nb,0.52,0.14,0.20,120.0,1\na,0.61,0.14,0.20,140.0,1\n"
    datasets = parse_datasets(io.StringIO(text))
    assert list(datasets) == ["a", "b"]
    assert len(datasets["a"]) == 2
    with pytest.raises(ContractError):
        parse_dataset(io.StringIO(text))


def test_serialize_parse_round_trip(ur_noiseless):
    again = parse_dataset(io.StringIO(serialize_dataset(ur_noiseless)))
    assert again == ur_noiseless


def test_file_round_trip(tmp_path, small_set):
    path = tmp_path / "data.csv"
    write_dataset_file(small_set, path)
    assert read_dataset_file(path)["ur10e"] == small_set


def test_read_trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("time_s,force_n\n0.0,0.0\n0.01,12.5\n")
    times, forces = read_trace_file(path)
    assert times == [0.0, 0.01]
    assert forces == [0.0, 12.5]


@pytest.mark.parametrize("reader", [read_dataset_file, read_trace_file])
def test_non_utf8_file_is_a_parse_error(tmp_path, reader):
    path = tmp_path / "bad.csv"
    path.write_bytes(HEADER.encode() + b"ur10e,0.52,0.14,\xff\xfe,150.0,1\n")
    with pytest.raises(DatasetParseError, match="not UTF-8"):
        reader(path)


# --------------------------- Filtering --------------------------- #


def test_filter_keeps_boundary(small_set):
    kept = filter_valid(small_set, 500.0)
    assert [s.force_n for s in kept] == [499.0, 500.0]


def test_filter_reports_removed_count(small_set):
    result = filter_valid_report(small_set, 500.0)
    assert result.removed_count == 1


def test_filter_no_op(small_set):
    assert filter_valid(small_set, 1000.0) == small_set


def test_filter_is_idempotent(small_set):
    once = filter_valid(small_set, 500.0)
    assert filter_valid(once, 500.0) == once


def test_filter_all_removed(small_set):
    with pytest.raises(EmptyDatasetError):
        filter_valid(small_set, 100.0)


def test_filter_rejects_non_positive_cutoff(small_set):
    with pytest.raises(ContractError):
        filter_valid(small_set, 0.0)


# --------------------------- Train/test split --------------------------- #


def _campaign_states():
    omitted = set(UR10E_OMITTED_POSITIONS)
    return [(d, h, v) for d, h, v in UR10E_FULL_GRID.states() if (d, h) not in omitted]


def test_ur10e_campaign_split_counts():
    states = _campaign_states()
    dataset = MeasurementSet(tuple(MeasurementSample(d, h, v, 100.0) for d, h, v in states), "ur10e")
    train, test = split_train_test(dataset, UR10E_TRAIN_GRID)
    assert len(train) == 27
    assert len(test) == 88


def test_split_partitions(ur_noiseless):
    train, test = split_train_test(ur_noiseless, UR10E_TRAIN_GRID)
    assert len(train) + len(test) == len(ur_noiseless)
    assert not set(train.samples) & set(test.samples)


def test_split_full_overlap(ur_noiseless):
    train, test = split_train_test(ur_noiseless, UR10E_FULL_GRID)
    assert len(test) == 0
    assert len(train) == len(ur_noiseless)


def test_split_tolerance_zero_matches_tiny_tolerance(ur_noiseless):
    assert split_train_test(ur_noiseless, UR10E_TRAIN_GRID, 0.0) == split_train_test(
        ur_noiseless, UR10E_TRAIN_GRID, 1e-9
    )


def test_split_warns_for_missing_states(small_set):
    split = split_train_test_report(small_set, UR10E_TRAIN_GRID)
    assert len(split.train) == 2
    assert len(split.test) == 1
    assert len(split.warnings) == UR10E_TRAIN_GRID.cell_count() - 2


# --------------------------- Helpers --------------------------- #


def test_distinct_levels_and_slice(ur_noiseless):
    heights = distinct_levels(ur_noiseless.heights())
    assert heights == list(UR10E_FULL_GRID.heights_m)
    sliced = slice_by_height(ur_noiseless, 0.30)
    assert len(sliced) == 25
    assert all(s.height_m == 0.30 for s in sliced)


def test_grid_rejects_unsorted_levels():
    with pytest.raises(ContractError):
        GridSpec((0.7, 0.5), (0.1,))


# --------------------------- Synthesis --------------------------- #


def test_zero_noise_equals_prediction(ur_model, grid_3x3x3):
    dataset = synthesize_dataset(ur_model, grid_3x3x3, 0.0, 2, seed=1)
    assert len(dataset) == 54
    for s in dataset:
        expected = math.exp(ur_model.linear_predictor(s.distance_m, s.height_m, s.velocity_mps))
        assert s.force_n == pytest.approx(expected, rel=1e-12)


def test_same_seed_same_set(ur_model, grid_3x3x3):
    first = synthesize_dataset(ur_model, grid_3x3x3, 2.0, 3, seed=7)
    second = synthesize_dataset(ur_model, grid_3x3x3, 2.0, 3, seed=7)
    assert first == second


def test_synthetic_repeatability_matches_noise(ur_model):
    dataset = synthesize_dataset(ur_model, UR10E_TRAIN_GRID, 1.12, 3, seed=11)
    stats = state_statistics(dataset)
    assert len(stats.per_state) == 27
    pooled_sd = float(np.sqrt(np.mean(stats.per_state["std"] ** 2)))
    assert pooled_sd == pytest.approx(1.12, rel=0.3)
    assert stats.mean_sd_n <= stats.max_sd_n


def test_out_of_domain_states_are_flagged(ur_model):
    grid = GridSpec((0.40, 0.70), (0.30,), (0.30,))
    dataset = synthesize_dataset(ur_model, grid, 0.0, 1, seed=0)
    assert dataset.samples[0].flags == (OUT_OF_DOMAIN,)
    assert dataset.samples[1].flags == ()


@pytest.mark.parametrize("noise, reps", [(-1.0, 1), (1.0, 0)])
def test_synthesis_preconditions(ur_model, grid_3x3x3, noise, reps):
    with pytest.raises(ContractError):
        synthesize_dataset(ur_model, grid_3x3x3, noise, reps, seed=0)
