import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from unittest.mock import patch

from src.dataio.Measurement import GridSpec
from src.fitting.CFMModel import CFMModel
from src.fitting.reference_models import KUKA_30NM_MODEL, REFERENCE_MODELS, UR10E_MODEL
from src.fitting.terms import INTERCEPT, TermSpec
from src.prediction.WorkspaceMap import (
    EFFECTIVE_MASS_MAP,
    SPEED_MAP,
    WorkspaceMap,
    map_to_csv,
    map_to_frame,
    map_to_grid_text,
    render_map,
    write_map,
)
from src.prediction.maps import force_map, speed_map
from src.prediction.safe_speed import (
    SafetyQuery,
    check_velocity_monotone,
    evaluate_force,
    max_safe_velocity,
    predict_force,
    velocity_polynomial,
    velocity_sensitivity,
)
from src.shared.errors import (
    ContractError,
    InfeasibleSpeedError,
    VelocityIndependentModelError,
)

MAP_GRID = GridSpec((0.52, 0.61, 0.70, 0.79, 0.88), (0.14, 0.22, 0.30, 0.38, 0.46))


def bisect_safe_speed(model, d, h, target_log, v_high, iterations=100):
    """Vectorized bisection for the last speed in [0, v_high] with ln F <= target_log."""
    low = np.zeros(len(d))
    high = np.full(len(d), float(v_high))
    for _ in range(iterations):
        middle = 0.5 * (low + high)
        below = model.linear_predictor(d, h, middle) <= target_log
        low = np.where(below, middle, low)
        high = np.where(below, high, middle)
    return low


# --------------------------- Force prediction --------------------------- #


def test_predict_force_known_value(ur_model):
    assert predict_force(ur_model, 0.8, 0.4, 0.16) == pytest.approx(140.6, abs=0.2)


def test_force_increases_with_speed(ur_model):
    slow = predict_force(ur_model, 0.8, 0.4, 0.16)
    fast = predict_force(ur_model, 0.8, 0.4, 0.36)
    assert fast > slow
    assert fast == pytest.approx(282.7, abs=0.3)


def test_extrapolation_is_reported(ur_model):
    assert evaluate_force(ur_model, 0.70, 0.30, 0.30).in_domain
    outside = evaluate_force(ur_model, 0.40, 0.30, 0.30)
    assert not outside.in_domain
    assert outside.force_n > 0


def test_non_finite_state_is_rejected(ur_model):
    with pytest.raises(ContractError):
        predict_force(ur_model, math.nan, 0.3, 0.3)


def test_sensitivity_is_positive_over_reference_domains():
    assert check_velocity_monotone(UR10E_MODEL)
    assert check_velocity_monotone(KUKA_30NM_MODEL)


def test_sensitivity_matches_finite_difference(ur_model):
    eps = 1e-6
    d, h, v = 0.7, 0.3, 0.3
    numeric = (ur_model.linear_predictor(d, h, v + eps) - ur_model.linear_predictor(d, h, v - eps)) / (2 * eps)
    assert velocity_sensitivity(ur_model, d, h, v) == pytest.approx(numeric, rel=1e-6)


def test_velocity_polynomial_reproduces_predictor(ur_model):
    A, B, C = velocity_polynomial(ur_model, 0.8, 0.4)
    assert A == pytest.approx(4.108906, abs=1e-5)
    assert B == pytest.approx(5.994916, abs=1e-5)
    assert C == pytest.approx(-4.8072, abs=1e-5)
    for v in (0.2, 0.33):
        assert A + B * v + C * v * v == pytest.approx(ur_model.linear_predictor(0.8, 0.4, v))


def test_velocity_polynomial_rejects_cubic_speed():
    model = CFMModel((INTERCEPT, TermSpec(0, 0, 3)), (1.0, 1.0))
    with pytest.raises(ContractError):
        velocity_polynomial(model, 0.5, 0.3)


# --------------------------- Safe speed --------------------------- #


def test_safe_speed_below_training_range_is_extrapolated(ur_model):
    result = max_safe_velocity(ur_model, SafetyQuery(0.8, 0.4, force_limit_n=140.0, margin_factor=1.0))
    assert result.velocity_mps == pytest.approx(0.15924, abs=1e-4)
    assert result.extrapolated
    assert not result.clamped


def test_safe_speed_meets_limit_exactly(ur_model):
    query = SafetyQuery(0.8, 0.4, force_limit_n=280.0, margin_factor=1.1)
    result = max_safe_velocity(ur_model, query)
    assert query.margin_factor * predict_force(ur_model, 0.8, 0.4, result.velocity_mps) == pytest.approx(280.0)
    assert not result.extrapolated


def test_limit_unreachable_inside_range_clamps(ur_model):
    result = max_safe_velocity(ur_model, SafetyQuery(0.8, 0.4, force_limit_n=5000.0, margin_factor=1.0))
    assert result.clamped
    assert result.velocity_mps == ur_model.domain.v_max


def test_limit_unreachable_without_domain_is_infinite():
    model = CFMModel((INTERCEPT, TermSpec(0, 0, 1), TermSpec(0, 0, 2)), (1.0, 1.0, -1.0))
    # ln F peaks at 1.25 when v = 0.5, below ln 140
    result = max_safe_velocity(model, SafetyQuery(0.5, 0.3, force_limit_n=140.0, margin_factor=1.0))
    assert result.velocity_mps == math.inf


def test_infeasible_position_raises(ur_model):
    with pytest.raises(InfeasibleSpeedError):
        max_safe_velocity(ur_model, SafetyQuery(0.52, 0.14, force_limit_n=140.0, margin_factor=1.1))


def test_velocity_independent_model_raises():
    model = CFMModel((INTERCEPT, TermSpec(1, 0, 0)), (1.0, 1.0))
    with pytest.raises(VelocityIndependentModelError):
        max_safe_velocity(model, SafetyQuery(0.5, 0.3))


def test_velocity_independent_wins_over_infeasible():
    model = CFMModel((INTERCEPT,), (10.0,))
    with pytest.raises(VelocityIndependentModelError):
        max_safe_velocity(model, SafetyQuery(0.5, 0.3))


def test_linear_speed_model_root():
    model = CFMModel((INTERCEPT, TermSpec(0, 0, 1)), (math.log(100.0), 1.0))
    result = max_safe_velocity(model, SafetyQuery(0.5, 0.3, force_limit_n=100.0 * math.e, margin_factor=1.0))
    assert result.velocity_mps == pytest.approx(1.0)


@pytest.mark.parametrize("field, value", [("force_limit_n", 0.0), ("margin_factor", 0.9)])
def test_safety_query_validation(field, value):
    with pytest.raises(ContractError):
        SafetyQuery(0.5, 0.3, **{field: value})


@settings(deadline=None, max_examples=50)
@given(
    limit=st.floats(150.0, 600.0),
    margin=st.floats(1.0, 1.5),
    d=st.sampled_from([0.61, 0.70, 0.79, 0.88]),
    h=st.sampled_from([0.22, 0.30, 0.38, 0.46]),
)
def test_safe_speed_respects_limit(limit, margin, d, h):
    query = SafetyQuery(d, h, force_limit_n=limit, margin_factor=margin)
    try:
        result = max_safe_velocity(UR10E_MODEL, query)
    except InfeasibleSpeedError:
        assert margin * predict_force(UR10E_MODEL, d, h, 1e-9) >= limit * (1 - 1e-9)
        return
    assert margin * predict_force(UR10E_MODEL, d, h, result.velocity_mps) <= limit * (1 + 1e-9)
    if not result.clamped:
        assert margin * predict_force(UR10E_MODEL, d, h, result.velocity_mps) == pytest.approx(limit)


@pytest.mark.parametrize("model", list(REFERENCE_MODELS.values()), ids=list(REFERENCE_MODELS))
def test_safe_speed_agrees_with_bisection(model):
    rng = np.random.default_rng(20)
    box = model.domain
    n = 10_000
    d = rng.uniform(box.d_min, box.d_max, n)
    h = rng.uniform(box.h_min, box.h_max, n)
    limit = rng.uniform(50.0, 500.0, n)
    margin = rng.uniform(1.0, 1.5, n)
    target_log = np.log(limit / margin)
    feasible = model.linear_predictor(d, h, np.zeros(n)) < target_log
    clamped = model.linear_predictor(d, h, np.full(n, box.v_max)) <= target_log
    oracle = bisect_safe_speed(model, d, h, target_log, box.v_max)

    for i in range(n):
        query = SafetyQuery(float(d[i]), float(h[i]), force_limit_n=float(limit[i]), margin_factor=float(margin[i]))
        if not feasible[i]:
            with pytest.raises(InfeasibleSpeedError):
                max_safe_velocity(model, query)
            continue
        result = max_safe_velocity(model, query)
        assert result.clamped == bool(clamped[i])
        assert abs(result.velocity_mps - oracle[i]) <= 1e-6
        assert margin[i] * predict_force(model, d[i], h[i], result.velocity_mps) <= limit[i] + 1e-6


def test_linear_speed_dependence_matches_bisection():
    coefficients = tuple(
        0.0 if term.velocity_degree == 2 else beta for term, beta in zip(UR10E_MODEL.terms, UR10E_MODEL.coefficients)
    )
    model = CFMModel(UR10E_MODEL.terms, coefficients, "no-v2")
    A, B, C = velocity_polynomial(model, 0.8, 0.4)
    assert C == 0.0
    assert B > 0
    limit = predict_force(model, 0.8, 0.4, 0.3)
    result = max_safe_velocity(model, SafetyQuery(0.8, 0.4, force_limit_n=limit, margin_factor=1.0))
    assert result.velocity_mps == pytest.approx((math.log(limit) - A) / B, abs=1e-12)
    oracle = bisect_safe_speed(model, np.array([0.8]), np.array([0.4]), math.log(limit), 1.0)[0]
    assert abs(result.velocity_mps - oracle) <= 1e-9


def test_higher_margin_lowers_safe_speed(ur_model):
    loose = max_safe_velocity(ur_model, SafetyQuery(0.8, 0.4, force_limit_n=200.0, margin_factor=1.0))
    tight = max_safe_velocity(ur_model, SafetyQuery(0.8, 0.4, force_limit_n=200.0, margin_factor=1.3))
    assert tight.velocity_mps < loose.velocity_mps


# --------------------------- Maps --------------------------- #


def test_force_map_shape_and_values(ur_model):
    fmap = force_map(ur_model, MAP_GRID, 0.3)
    assert fmap.shape == (5, 5)
    assert fmap.value_at(0.70, 0.30) == pytest.approx(predict_force(ur_model, 0.70, 0.30, 0.3))


def test_force_map_decreases_with_distance_on_lowest_row(ur_model):
    fmap = force_map(ur_model, MAP_GRID, 0.3)
    row = fmap.values[:, 0]
    assert np.all(np.diff(row) < 0)


def test_force_map_flags_out_of_domain(ur_model):
    grid = GridSpec((0.40, 0.70), (0.30,))
    fmap = force_map(ur_model, grid, 0.3)
    assert fmap.flags[0][0] == ("out_of_domain",)
    assert fmap.flags[1][0] == ()


def test_sub_grid_map_equals_restricted_map(ur_model):
    coarse = GridSpec((0.52, 0.70, 0.88), (0.14, 0.30, 0.46))
    full = force_map(ur_model, MAP_GRID, 0.25)
    sub = force_map(ur_model, coarse, 0.25)
    for d, h, value, _ in sub.cells():
        assert value == pytest.approx(full.value_at(d, h), rel=1e-12)


def test_speed_map_marks_unsafe_cells(ur_model):
    smap = speed_map(ur_model, MAP_GRID, SafetyQuery(0.7, 0.3, force_limit_n=140.0), max_workers=2)
    assert smap.kind == SPEED_MAP
    mask = smap.sentinel_mask()
    assert mask[0, 0]
    assert math.isnan(smap.value_at(0.52, 0.14))
    assert "unsafe" in smap.flags[0][0]
    assert not mask.all()


def test_speed_map_matches_pointwise_queries(ur_model):
    query = SafetyQuery(0.7, 0.3, force_limit_n=280.0)
    smap = speed_map(ur_model, MAP_GRID, query, max_workers=3)
    for d, h, value, flags in smap.cells():
        if "unsafe" in flags:
            continue
        assert value == pytest.approx(max_safe_velocity(ur_model, query.at(d, h)).velocity_mps)


def test_speed_map_refinement_is_consistent(ur_model):
    query = SafetyQuery(0.7, 0.3, force_limit_n=280.0)
    fine = GridSpec(tuple(np.round(np.linspace(0.52, 0.88, 9), 3)), (0.14, 0.30, 0.46))
    coarse = GridSpec((0.52, 0.70, 0.88), (0.14, 0.30, 0.46))
    fine_map = speed_map(ur_model, fine, query, max_workers=1)
    coarse_map = speed_map(ur_model, coarse, query, max_workers=1)
    for d, h, value, _ in coarse_map.cells():
        other = fine_map.value_at(d, h)
        assert (math.isnan(value) and math.isnan(other)) or value == pytest.approx(other)


def test_map_cells_do_not_depend_on_evaluation_order(ur_model):
    query = SafetyQuery(0.7, 0.3, force_limit_n=280.0)
    fmap = force_map(ur_model, MAP_GRID, 0.3)
    smap = speed_map(ur_model, MAP_GRID, query, max_workers=2)
    cells = list(product(range(len(MAP_GRID.distances_m)), range(len(MAP_GRID.heights_m))))
    for k in np.random.default_rng(5).permutation(len(cells)):
        i, j = cells[k]
        single = GridSpec((MAP_GRID.distances_m[i],), (MAP_GRID.heights_m[j],))
        assert force_map(ur_model, single, 0.3).values[0, 0] == pytest.approx(fmap.values[i, j], rel=1e-14)
        cell = speed_map(ur_model, single, query, max_workers=1)
        assert cell.flags[0][0] == smap.flags[i][j]
        if "unsafe" in cell.flags[0][0]:
            assert math.isnan(smap.values[i, j])
        else:
            assert cell.values[0, 0] == pytest.approx(smap.values[i, j], rel=1e-14)


def test_speed_map_rejects_cubic_speed_model():
    model = CFMModel((INTERCEPT, TermSpec(0, 0, 1), TermSpec(0, 0, 3)), (4.0, 2.0, 0.5), "cubic")
    grid = GridSpec((0.5, 0.6), (0.1, 0.2))
    with pytest.raises(ContractError):
        speed_map(model, grid, SafetyQuery(0.5, 0.1, force_limit_n=140.0), max_workers=1)


@patch("src.prediction.maps.check_velocity_monotone", return_value=True)
def test_speed_map_checks_force_increases_with_speed(mock_check, ur_model):
    speed_map(ur_model, MAP_GRID, SafetyQuery(0.7, 0.3, force_limit_n=280.0), max_workers=1)
    mock_check.assert_called_once_with(ur_model)


# --------------------------- Map export --------------------------- #


def _small_map():
    grid = GridSpec((0.5, 0.6), (0.1, 0.2))
    values = np.array([[1.0, math.nan], [0.123456789123, math.inf]])
    flags = (((), ("unreachable",)), ((), ("infinite",)))
    return WorkspaceMap(grid, values, EFFECTIVE_MASS_MAP, flags, {"arm": "test"})


def test_csv_export():
    text = map_to_csv(_small_map())
    lines = text.strip().split("\n")
    assert lines[0] == "d_m,h_m,value,flags"
    assert lines[1] == "0.5,0.1,1,"
    assert lines[2] == "0.5,0.2,unreachable,unreachable"
    assert lines[3] == "0.6,0.1,0.123456789,"
    assert lines[4] == "0.6,0.2,inf,infinite"


def test_grid_text_export():
    lines = map_to_grid_text(_small_map()).strip().split("\n")
    assert lines[0] == "# kind: effective-mass-map"
    assert lines[1] == "# d_levels: 0.5 0.6"
    assert lines[2] == "# h_levels: 0.1 0.2"
    assert lines[3] == "# arm: test"
    assert lines[4] == "1 0.123456789"
    assert lines[5] == "unreachable inf"


def test_grid_text_metadata_uses_significant_digits():
    metadata = {"force_limit_n": 0.1 + 0.2, "margin_factor": 1.1, "model": "ur10e"}
    wmap = WorkspaceMap(GridSpec((0.5,), (0.1,)), np.array([[0.2]]), SPEED_MAP, metadata=metadata)
    lines = map_to_grid_text(wmap).split("\n")
    assert "# force_limit_n: 0.3" in lines
    assert "# margin_factor: 1.1" in lines
    assert "# model: ur10e" in lines


def test_frame_keeps_raw_values():
    frame = map_to_frame(_small_map())
    assert list(frame.columns) == ["d_m", "h_m", "value", "flags"]
    assert len(frame) == 4
    assert math.isnan(frame.loc[1, "value"])
    assert frame.loc[3, "flags"] == "infinite"


def test_render_map_rejects_unknown_format():
    with pytest.raises(ContractError):
        render_map(_small_map(), "xlsx")


def test_write_map(tmp_path):
    path = tmp_path / "map.txt"
    write_map(_small_map(), path, "grid")
    assert path.read_text().startswith("# kind: effective-mass-map")


def test_map_shape_is_checked():
    with pytest.raises(ContractError):
        WorkspaceMap(GridSpec((0.5,), (0.1,)), np.zeros((2, 1)), SPEED_MAP)


def test_speed_map_rejects_negative_values():
    with pytest.raises(ContractError):
        WorkspaceMap(GridSpec((0.5,), (0.1,)), np.array([[-0.1]]), SPEED_MAP)
