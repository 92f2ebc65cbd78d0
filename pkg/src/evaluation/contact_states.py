from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.evaluation.ContactStateMachine import ContactStateMachine


class BasePhase:
    def __init__(self, state_machine: "ContactStateMachine"):
        self.state_machine = state_machine

    @property
    def name(self):
        return self.__class__.__name__.replace("Phase", "").lower()

    def can_transition_to(self, new_phase: str) -> bool:
        return False

    def handle_sample(self, time_s, force_n):
        """Default: samples do not change anything."""
        return None


class PreContactPhase(BasePhase):
    @property
    def name(self):
        return "pre_contact"

    def can_transition_to(self, new_phase):
        return new_phase == "impact"

    def handle_sample(self, time_s, force_n):
        machine = self.state_machine
        if force_n > machine.baseline_n + machine.onset_threshold_n:
            machine.mark_onset(time_s)
            machine.transition_to("impact", f"force {force_n:.6g} N above baseline", time_s)
            machine.current_phase.handle_sample(time_s, force_n)


class ImpactPhase(BasePhase):
    def can_transition_to(self, new_phase):
        return new_phase in ["released", "clamped"]

    def handle_sample(self, time_s, force_n):
        machine = self.state_machine
        if time_s <= machine.window_end_s:
            machine.peak_force_n = max(machine.peak_force_n, force_n)
        if time_s >= machine.window_end_s:
            machine.sustained_force_n = max(machine.sustained_force_n, force_n)


class ReleasedPhase(BasePhase):
    """Force diminished after the transient window: the robot bounced back."""


class ClampedPhase(BasePhase):
    """Force persists after the transient window."""
