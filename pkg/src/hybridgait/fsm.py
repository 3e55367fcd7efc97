"""Stance/swing segmentation of the gait cycle and per-phase RMS accumulation.

Phase is derived from the reference-path position of the projected point, not
from foot contact: the plant has no ground model, and the band controller only
needs to know which gain set applies. A small hysteresis suppresses classifier
chatter near the split; a backward jump of the path phase marks cycle end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def classify_phase(path_phase: float, stance_fraction: float = 0.6) -> str:
    """Label a normalized cycle position: stance below the split, swing at or above."""
    if not 0.0 <= path_phase < 1.0:
        raise ValueError("path phase must lie in [0, 1)")
    return "stance" if path_phase < stance_fraction else "swing"


@dataclass
class PhaseEnded:
    phase: str
    rms: dict[str, float]
    cycle: int


@dataclass
class CycleEnded:
    cycle: int
    stance_rms: dict[str, float] | None
    swing_rms: dict[str, float] | None


@dataclass
class PhaseAccumulator:
    """Per-leg tracker: current phase, its running error sums, completed cycles.

    norm_errs passed to on_tick carry one scalar per controller channel
    (muscles for the stimulation gains, joints for the robot gains); the RMS
    of each stream over a phase feeds that phase's learning update.
    """

    stance_fraction: float = 0.6
    hysteresis_ticks: int = 3
    phase: str = "stance"
    sum_sq: dict[str, float] = field(default_factory=dict)
    n_samples: int = 0
    cycle_index: int = 0

    _disagree: int = 0
    _last_path_phase: float | None = None
    _rms_this_cycle: dict[str, dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.stance_fraction < 1.0:
            raise ValueError("stance fraction must lie in (0, 1)")
        if self.hysteresis_ticks < 1:
            raise ValueError("hysteresis must be at least one tick")

    def _close_phase(self) -> PhaseEnded | None:
        if self.n_samples == 0:
            self.sum_sq = {}
            return None
        rms = {k: math.sqrt(v / self.n_samples) for k, v in self.sum_sq.items()}
        event = PhaseEnded(phase=self.phase, rms=rms, cycle=self.cycle_index)
        self._rms_this_cycle[self.phase] = rms
        self.sum_sq = {}
        self.n_samples = 0
        return event

    def on_tick(self, path_phase: float, norm_errs: dict[str, float]) -> list:
        """Accumulate one tick and emit phase/cycle completion events.

        A wrap (path phase dropping by more than half a cycle) closes the open
        phase unconditionally so cycle RMS values never bleed across cycles;
        mid-cycle flips need the classifier to disagree for hysteresis_ticks
        consecutive ticks.
        """
        events: list = []
        if self._last_path_phase is None:
            self.phase = classify_phase(path_phase, self.stance_fraction)

        wrapped = self._last_path_phase is not None and (self._last_path_phase - path_phase) > 0.5
        if wrapped:
            ended = self._close_phase()
            if ended is not None:
                events.append(ended)
            self.cycle_index += 1
            events.append(
                CycleEnded(
                    cycle=self.cycle_index,
                    stance_rms=self._rms_this_cycle.get("stance"),
                    swing_rms=self._rms_this_cycle.get("swing"),
                )
            )
            self._rms_this_cycle = {}
            self.phase = classify_phase(path_phase, self.stance_fraction)
            self._disagree = 0

        for key, val in norm_errs.items():
            self.sum_sq[key] = self.sum_sq.get(key, 0.0) + val * val
        self.n_samples += 1

        if not wrapped:
            if classify_phase(path_phase, self.stance_fraction) != self.phase:
                self._disagree += 1
            else:
                self._disagree = 0
            if self._disagree >= self.hysteresis_ticks:
                ended = self._close_phase()
                if ended is not None:
                    events.append(ended)
                self.phase = "swing" if self.phase == "stance" else "stance"
                self._disagree = 0

        self._last_path_phase = path_phase
        return events
