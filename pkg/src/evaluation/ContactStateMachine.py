import math
from dataclasses import dataclass
from typing import Tuple

from src.evaluation.contact_states import ClampedPhase, ImpactPhase, PreContactPhase, ReleasedPhase
from src.shared.config import (
    FORCE_LIMIT_QUASI_STATIC_N,
    FORCE_LIMIT_TRANSIENT_N,
    NOISE_FLOOR_N,
    ONSET_THRESHOLD_N,
    TRANSIENT_WINDOW_S,
)
from src.shared.errors import ContractError, InsufficientTraceError
from src.shared.logger_manager import LoggerMixin
from src.shared.utils import strictly_increasing

TRANSIENT = "transient"
QUASI_STATIC = "quasi-static"


@dataclass(frozen=True)
class ForceTrace:
    timestamps_s: Tuple[float, ...]
    forces_n: Tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.timestamps_s)
        forces = tuple(float(f) for f in self.forces_n)
        if len(times) != len(forces) or len(times) < 2:
            raise ContractError("a force trace needs equally many (>= 2) timestamps and forces")
        if not all(math.isfinite(x) for x in times + forces):
            raise ContractError("force trace contains non-finite values")
        if not strictly_increasing(times):
            raise ContractError("trace timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps_s", times)
        object.__setattr__(self, "forces_n", forces)


@dataclass(frozen=True)
class ContactVerdict:
    kind: str
    compliant: bool
    onset_time_s: float
    peak_force_n: float
    sustained_force_n: float


# Walks a force trace sample by sample: pre_contact until the force rises above the baseline,
# impact for the transient window, then released or clamped depending on what force remains.
class ContactStateMachine(LoggerMixin):
    def __init__(
        self,
        trace,
        transient_window_s=TRANSIENT_WINDOW_S,
        onset_threshold_n=ONSET_THRESHOLD_N,
        noise_floor_n=NOISE_FLOOR_N,
    ):
        super().__init__()
        if transient_window_s <= 0:
            raise ContractError("transient window must be positive")
        self.trace = trace
        self.transient_window_s = transient_window_s
        self.onset_threshold_n = onset_threshold_n
        self.noise_floor_n = noise_floor_n
        self.baseline_n = trace.forces_n[0]
        self.onset_time_s = None
        self.window_end_s = None
        self.peak_force_n = -math.inf
        self.sustained_force_n = -math.inf
        self.phases = {
            "pre_contact": PreContactPhase(self),
            "impact": ImpactPhase(self),
            "released": ReleasedPhase(self),
            "clamped": ClampedPhase(self),
        }
        self.current_phase = self.phases["pre_contact"]

    def mark_onset(self, time_s):
        self.onset_time_s = time_s
        self.window_end_s = time_s + self.transient_window_s

    def transition_to(self, phase_name, reason, time_s=None):
        """
        Transition to a new phase with validation and logging.
        """
        if phase_name not in self.phases:
            raise ValueError(f"Phase '{phase_name}' is not recognized.")
        if not self.current_phase.can_transition_to(phase_name):
            raise ValueError(
                f"Invalid phase transition from '{self.current_phase.name}' to '{phase_name}'."
            )
        self.log_state_transition("contact", self.current_phase.name, phase_name, time_s)
        self.log_debugger(f"-> {phase_name}: {reason}")
        self.current_phase = self.phases[phase_name]

    def run(self):
        """Feed every sample, then settle the final phase. Returns the final phase name."""
        for time_s, force_n in zip(self.trace.timestamps_s, self.trace.forces_n):
            self.current_phase.handle_sample(time_s, force_n)

        if self.onset_time_s is None:
            raise InsufficientTraceError("no impact onset found in the trace")
        if self.trace.timestamps_s[-1] < self.window_end_s:
            raise InsufficientTraceError(
                f"trace ends at {self.trace.timestamps_s[-1]:.6g} s, before the transient window "
                f"closes at {self.window_end_s:.6g} s"
            )
        if self.sustained_force_n <= self.noise_floor_n:
            self.transition_to("released", f"force after window {self.sustained_force_n:.6g} N", self.window_end_s)
        else:
            self.transition_to("clamped", f"force after window {self.sustained_force_n:.6g} N", self.window_end_s)
        return self.current_phase.name


def classify_contact(
    trace,
    transient_window_s=TRANSIENT_WINDOW_S,
    quasi_static_limit_n=FORCE_LIMIT_QUASI_STATIC_N,
    transient_limit_n=FORCE_LIMIT_TRANSIENT_N,
    onset_threshold_n=ONSET_THRESHOLD_N,
    noise_floor_n=NOISE_FLOOR_N,
):
    """
    Transient when the force has died down to the noise floor once the window after onset is
    over, quasi-static otherwise. Compliant when the peak inside the window respects
    transient_limit_n and, for quasi-static contact, the force after the window respects
    quasi_static_limit_n.
    """
    machine = ContactStateMachine(trace, transient_window_s, onset_threshold_n, noise_floor_n)
    phase = machine.run()
    kind = TRANSIENT if phase == "released" else QUASI_STATIC
    compliant = machine.peak_force_n <= transient_limit_n and (
        kind == TRANSIENT or machine.sustained_force_n <= quasi_static_limit_n
    )
    return ContactVerdict(kind, compliant, machine.onset_time_s, machine.peak_force_n, machine.sustained_force_n)
