import numpy as np
import pytest
from unittest.mock import patch

from src.evaluation.ContactStateMachine import (
    QUASI_STATIC,
    TRANSIENT,
    ContactStateMachine,
    ForceTrace,
    classify_contact,
)
from src.shared.errors import ContractError, InsufficientTraceError

# --------------------------- Fixtures --------------------------- #


def make_trace(peak_n, sustained_n, onset_s=0.2, end_s=1.5, step_s=0.01):
    """Zero force, a 50 ms spike of peak_n at onset, then sustained_n until the end."""
    times = np.round(np.arange(0.0, end_s + step_s / 2, step_s), 6)
    forces = np.where(times < onset_s, 0.0, sustained_n)
    spike = (times >= onset_s) & (times < onset_s + 0.05)
    forces = np.where(spike, peak_n, forces)
    return ForceTrace(tuple(times), tuple(forces))


@pytest.fixture
def bounce_trace():
    return make_trace(peak_n=200.0, sustained_n=1.0)


@pytest.fixture
def clamp_trace():
    return make_trace(peak_n=200.0, sustained_n=120.0)


@pytest.fixture
def state_machine(bounce_trace):
    return ContactStateMachine(bounce_trace)


# --------------------------- Phase Transitions --------------------------- #


def test_initial_phase_is_pre_contact(state_machine):
    assert state_machine.current_phase.name == "pre_contact"


def test_valid_phase_transitions(state_machine):
    state_machine.transition_to("impact", "test")
    assert state_machine.current_phase.name == "impact"
    state_machine.transition_to("clamped", "test")
    assert state_machine.current_phase.name == "clamped"


def test_invalid_phase_transitions(state_machine):
    with pytest.raises(ValueError, match="Invalid phase transition"):
        state_machine.transition_to("released", "skipping impact")


def test_unknown_phase(state_machine):
    with pytest.raises(ValueError, match="not recognized"):
        state_machine.transition_to("bouncing", "test")


def test_final_phases_are_terminal(state_machine):
    state_machine.transition_to("impact", "test")
    state_machine.transition_to("released", "test")
    with pytest.raises(ValueError):
        state_machine.transition_to("impact", "again")


@patch("src.evaluation.ContactStateMachine.ContactStateMachine.log_state_transition")
def test_run_logs_each_transition(mock_log_state_transition, state_machine):
    assert state_machine.run() == "released"
    assert mock_log_state_transition.call_count == 2
    mock_log_state_transition.assert_any_call("contact", "pre_contact", "impact", pytest.approx(0.2))
    mock_log_state_transition.assert_any_call("contact", "impact", "released", pytest.approx(0.7))


# --------------------------- Classification --------------------------- #


def test_bounce_is_transient_and_compliant(bounce_trace):
    verdict = classify_contact(bounce_trace)
    assert verdict.kind == TRANSIENT
    assert verdict.compliant
    assert verdict.onset_time_s == pytest.approx(0.2)
    assert verdict.peak_force_n == 200.0


def test_clamp_is_quasi_static_and_compliant_below_limit(clamp_trace):
    verdict = classify_contact(clamp_trace)
    assert verdict.kind == QUASI_STATIC
    assert verdict.sustained_force_n == 120.0
    assert verdict.compliant


def test_clamp_above_quasi_static_limit_is_not_compliant():
    verdict = classify_contact(make_trace(peak_n=200.0, sustained_n=150.0))
    assert verdict.kind == QUASI_STATIC
    assert not verdict.compliant


def test_peak_above_transient_limit_is_not_compliant():
    verdict = classify_contact(make_trace(peak_n=300.0, sustained_n=0.0))
    assert verdict.kind == TRANSIENT
    assert not verdict.compliant


def test_noise_floor_separates_kinds():
    assert classify_contact(make_trace(200.0, 5.0)).kind == TRANSIENT
    assert classify_contact(make_trace(200.0, 5.5)).kind == QUASI_STATIC


def test_custom_limits():
    verdict = classify_contact(make_trace(200.0, 120.0), quasi_static_limit_n=100.0)
    assert not verdict.compliant


def test_onset_is_relative_to_baseline():
    trace = make_trace(200.0, 1.0)
    shifted = ForceTrace(trace.timestamps_s, tuple(f + 30.0 for f in trace.forces_n))
    verdict = classify_contact(shifted, noise_floor_n=40.0)
    assert verdict.onset_time_s == pytest.approx(0.2)


# --------------------------- Edge Cases --------------------------- #


def test_no_onset_raises():
    trace = ForceTrace((0.0, 0.5, 1.0), (0.0, 1.0, 2.0))
    with pytest.raises(InsufficientTraceError, match="no impact onset"):
        classify_contact(trace)


def test_trace_shorter_than_window_raises():
    with pytest.raises(InsufficientTraceError, match="before the transient window"):
        classify_contact(make_trace(200.0, 1.0, end_s=0.6))


@pytest.mark.parametrize(
    "times, forces",
    [
        ((0.0,), (0.0,)),
        ((0.0, 0.1), (0.0,)),
        ((0.0, 0.0), (0.0, 1.0)),
        ((0.0, float("nan")), (0.0, 1.0)),
    ],
)
def test_invalid_traces(times, forces):
    with pytest.raises(ContractError):
        ForceTrace(times, forces)


def test_window_must_be_positive(bounce_trace):
    with pytest.raises(ContractError):
        ContactStateMachine(bounce_trace, transient_window_s=0.0)


@pytest.mark.parametrize("padding", [1, 10, 60])
@pytest.mark.parametrize("sustained_n", [1.0, 120.0, 180.0])
def test_leading_zeros_do_not_change_verdict(padding, sustained_n):
    trace = make_trace(peak_n=200.0, sustained_n=sustained_n)
    start = trace.timestamps_s[0]
    lead = tuple(round(start - 0.01 * k, 6) for k in range(padding, 0, -1))
    padded = ForceTrace(lead + trace.timestamps_s, (0.0,) * padding + trace.forces_n)
    assert classify_contact(padded) == classify_contact(trace)
