"""Adaptive stimulation controller: pulse-width law, per-cycle gain update, band shrink.

Each stimulated muscle gets a proportional pulse-width command from the banded
tracking error of its joint, scaled by current fitness and by a per-phase gain
that a cycle-wise learning rule pulls toward the recent normalized error. The
stimulation band shrinks with mean fitness so the robot steps in earlier as
muscles tire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .muscle import FatigueParams, MuscleState

Action = Literal["flexor", "extensor"]
Phase = Literal["stance", "swing"]


@dataclass
class MuscleChannel:
    """One stimulated muscle: which joint it moves, in which direction."""

    name: str
    joint: Literal["hip", "knee"]
    side: Literal["left", "right"]
    action: Action
    params: FatigueParams
    state: MuscleState = field(default_factory=MuscleState)


@dataclass
class FesGains:
    """Per-leg stimulation gains: per-muscle, per-phase learning gains.

    k_f maps banded error (rad) to pulse width (us) and is tied to the initial
    band radius so a two-band-widths error commands the full recruitment ramp.
    """

    gamma_st: dict[str, float]
    gamma_sw: dict[str, float]
    k_f: dict[str, float]
    r_fesb0: float
    phi_f: float = 0.95

    def __post_init__(self):
        if not 0.0 < self.phi_f < 1.0:
            raise ValueError("forgetting factor must lie in (0, 1)")
        if self.r_fesb0 <= 0.0:
            raise ValueError("initial band radius must be positive")

    def gamma(self, phase: Phase) -> dict[str, float]:
        return self.gamma_st if phase == "stance" else self.gamma_sw


def pulse_width_stiffness(params: FatigueParams, r_fesb0: float) -> float:
    """Proportional gain (us/rad) spanning the recruitment ramp over 2*r_fesb0."""
    return (params.u_sat - params.u_thr) / (2.0 * r_fesb0)


def make_fes_gains(
    channels: list[MuscleChannel],
    r_fesb0: float,
    phi_f: float = 0.95,
    gamma_init: float | dict[str, float] = 1.0,
) -> FesGains:
    """Build gains for a leg's channel set, starting both phases at gamma_init."""
    if isinstance(gamma_init, dict):
        g0 = {ch.name: float(gamma_init.get(ch.name, 1.0)) for ch in channels}
    else:
        g0 = {ch.name: float(gamma_init) for ch in channels}
    kf = {ch.name: pulse_width_stiffness(ch.params, r_fesb0) for ch in channels}
    return FesGains(gamma_st=dict(g0), gamma_sw=dict(g0), k_f=kf, r_fesb0=r_fesb0, phi_f=phi_f)


def muscle_error(fes_error: float, action: Action) -> float:
    """Part of a joint's banded error this muscle can correct, as a magnitude.

    Sign convention: errors are reference minus actual with flexion positive,
    so a positive error means the joint should flex more and engages the
    flexor; a negative error engages the extensor. The antagonist gets zero.
    """
    if action == "flexor":
        return max(fes_error, 0.0)
    return max(-fes_error, 0.0)


def stimulation(channel: MuscleChannel, gains: FesGains, phase: Phase, err: float) -> float:
    """Commanded pulse width (us) for one muscle, clamped to [0, u_sat].

    Sub-threshold commands are sent as-is; the recruitment ramp already maps
    them to zero excitation, and gating them here would distort the learning
    rule's error signal.
    """
    if err < 0.0:
        raise ValueError("muscle error must be nonnegative")
    u = channel.state.mu * gains.gamma(phase)[channel.name] * gains.k_f[channel.name] * err
    return min(max(u, 0.0), channel.params.u_sat)


def update_gamma(gains: FesGains, phase: Phase, rms_norm_err: dict[str, float]) -> FesGains:
    """Cycle-wise gain update: forget toward the phase's normalized RMS error.

    Called once per completed gait cycle per phase. Gains are clamped to
    [0, 1] afterwards; muscles absent from rms_norm_err keep their gain.
    """
    lam = 1.0 - gains.phi_f
    updated = dict(gains.gamma(phase))
    for name, rms in rms_norm_err.items():
        if rms < 0.0:
            raise ValueError("normalized RMS error must be nonnegative")
        g = gains.phi_f * updated[name] + lam * rms
        updated[name] = min(max(g, 0.0), 1.0)
    if phase == "stance":
        return FesGains(updated, dict(gains.gamma_sw), dict(gains.k_f), gains.r_fesb0, gains.phi_f)
    return FesGains(dict(gains.gamma_st), updated, dict(gains.k_f), gains.r_fesb0, gains.phi_f)


def fes_band_radius(gains: FesGains, muscle_states: list[MuscleState], r_db: float) -> float:
    """Band radius scaled by mean fitness of the stimulated muscles.

    Never shrinks below the dead band, which would make the band geometry
    meaningless.
    """
    if not muscle_states:
        raise ValueError("need at least one stimulated muscle")
    mean_mu = sum(s.mu for s in muscle_states) / len(muscle_states)
    return max(gains.r_fesb0 * mean_mu, r_db)
