"""Adaptive exoskeleton joint controller: banded PD torque with cycle-wise stiffness learning.

The robot acts only outside the stimulation band. Its stiffness per joint and
gait phase forgets toward (baseline * normalized RMS error) every cycle, and
damping tracks stiffness through a fixed critical-damping coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fes import Phase

N_JOINTS = 2  # hip, knee


@dataclass
class ExoGains:
    """Per-leg robot gains: per-joint stiffness for stance and swing.

    k0 is the baseline stiffness the learning rule scales, c_cr the per-joint
    damping coefficient in B = c_cr * sqrt(K).
    """

    k_st: np.ndarray
    k_sw: np.ndarray
    k0: float
    c_cr: np.ndarray
    phi_e: float = 0.95

    def __post_init__(self):
        self.k_st = np.asarray(self.k_st, dtype=float)
        self.k_sw = np.asarray(self.k_sw, dtype=float)
        self.c_cr = np.asarray(self.c_cr, dtype=float)
        if not 0.0 < self.phi_e < 1.0:
            raise ValueError("forgetting factor must lie in (0, 1)")
        if self.k0 < 0.0 or np.any(self.k_st < 0.0) or np.any(self.k_sw < 0.0):
            raise ValueError("stiffness must be nonnegative")

    def stiffness(self, phase: Phase) -> np.ndarray:
        return self.k_st if phase == "stance" else self.k_sw


def make_exo_gains(
    baseline_stiffness: float = 340.0,
    c_cr: float | np.ndarray = 2.0,
    phi_e: float = 0.95,
) -> ExoGains:
    """Gains with both phases starting at the baseline stiffness."""
    k0 = float(baseline_stiffness)
    c = np.broadcast_to(np.asarray(c_cr, dtype=float), (N_JOINTS,)).copy()
    return ExoGains(
        k_st=np.full(N_JOINTS, k0),
        k_sw=np.full(N_JOINTS, k0),
        k0=k0,
        c_cr=c,
        phi_e=phi_e,
    )


def exo_torque(
    gains: ExoGains,
    phase: Phase,
    exo_error: np.ndarray,
    exo_error_rate: np.ndarray,
    torque_limit: float = 35.0,
) -> np.ndarray:
    """Per-joint PD assistive torque (Nm), clamped symmetrically to the actuator limit.

    Pure spring-damper on the banded error; the scenario loop is responsible
    for keeping the robot passive while the error sits inside the stimulation
    band (the damping term has filter memory that would otherwise leak
    torque into the band).
    """
    k = gains.stiffness(phase)
    tau = k * exo_error + gains.c_cr * np.sqrt(k) * exo_error_rate
    return np.clip(tau, -torque_limit, torque_limit)


def update_stiffness(gains: ExoGains, phase: Phase, rms_norm_err: np.ndarray) -> ExoGains:
    """Cycle-wise stiffness update toward baseline * normalized RMS error."""
    rms = np.asarray(rms_norm_err, dtype=float)
    if np.any(rms < 0.0):
        raise ValueError("normalized RMS error must be nonnegative")
    k = gains.stiffness(phase)
    k_new = np.maximum(gains.phi_e * k + (1.0 - gains.phi_e) * gains.k0 * rms, 0.0)
    if phase == "stance":
        return ExoGains(k_new, gains.k_sw.copy(), gains.k0, gains.c_cr.copy(), gains.phi_e)
    return ExoGains(gains.k_st.copy(), k_new, gains.k0, gains.c_cr.copy(), gains.phi_e)


class ErrorRateFilter:
    """Backward-difference rate of the banded error, first-order low-passed.

    Differentiating a soft-thresholded signal gives kinks at band crossings;
    the low-pass keeps the damping term usable at the control tick.
    """

    def __init__(self, cutoff_hz: float = 10.0, n: int = N_JOINTS):
        if cutoff_hz <= 0.0:
            raise ValueError("cutoff must be positive")
        self.rc = 1.0 / (2.0 * math.pi * cutoff_hz)
        self.prev = np.zeros(n)
        self.rate = np.zeros(n)

    def update(self, exo_error: np.ndarray, dt: float) -> np.ndarray:
        raw = (np.asarray(exo_error, dtype=float) - self.prev) / dt
        alpha = dt / (self.rc + dt)
        self.rate = self.rate + alpha * (raw - self.rate)
        self.prev = np.array(exo_error, dtype=float)
        return self.rate.copy()
