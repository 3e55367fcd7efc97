"""Stimulated-muscle model: excitation, activation dynamics and fitness/fatigue.

A commanded pulse width maps to a normalized excitation through a threshold /
saturation ramp. Excitation drives a second-order lag (two real poles, rise
and fall time constants switched on the sign of e - a) to give activation.
Fitness evolves on a slow fatigue/recovery ODE driven by the effective
activation a_f = a * mu, so tired muscles both produce and accumulate less.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

MAX_DT = 0.05  # s, stepping functions reject coarser ticks


@dataclass
class FatigueParams:
    """Per-muscle recruitment and fatigue constants.

    u_thr/u_sat are the pulse widths (us) bracketing the linear recruitment
    ramp at the calibration amplitude and frequency. T_fat/T_rec set the
    fatigue and recovery rates (s), T_rise/T_fall/T_e the activation lag (s),
    mu_min the fitness floor and beta the frequency shape factor.
    """

    u_thr: float
    u_sat: float
    T_fat: float
    T_rec: float
    T_rise: float
    T_fall: float
    T_e: float
    mu_min: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.u_thr < self.u_sat:
            raise ValueError("need u_sat > u_thr > 0")
        if self.T_fat <= 0.0 or self.T_rec <= 0.0:
            raise ValueError("T_fat and T_rec must be positive")
        if min(self.T_rise, self.T_fall, self.T_e) < 0.0:
            raise ValueError("time constants must be nonnegative")
        if not 0.0 <= self.mu_min < 1.0:
            raise ValueError("mu_min must lie in [0, 1)")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")


# Calibration defaults from an isometric session on one healthy adult
# (25 Hz / 25 mA surface stimulation), keyed by (side, muscle).
DEFAULT_FATIGUE_PARAMS: dict[tuple[str, str], FatigueParams] = {
    ("right", "quadriceps"): FatigueParams(100, 700, 57.01, 59.87, 0.2071, 0.1370, 0.0, 0.07, 0.0747),
    ("right", "hamstring"): FatigueParams(250, 600, 64.34, 65.27, 0.2440, 0.0829, 0.06, 0.13, 0.1493),
    ("left", "quadriceps"): FatigueParams(200, 600, 36.05, 69.56, 0.1428, 0.2533, 0.0, 0.17, 0.2453),
    ("left", "hamstring"): FatigueParams(250, 550, 44.58, 105.19, 0.1963, 0.1797, 0.002, 0.14, 0.2347),
}

DEFAULT_STIM_FREQUENCY_HZ = 25.0


@dataclass
class MuscleState:
    """Instantaneous muscle state: fitness mu, activation a and its rate."""

    mu: float = 1.0
    a: float = 0.0
    a_dot: float = 0.0
    e: float = 0.0

    @property
    def effective_activation(self) -> float:
        """Fatigue-scaled activation a_f = a * mu."""
        return self.a * self.mu


def excitation(u_f: float, p: FatigueParams) -> float:
    """Normalized excitation for a commanded pulse width (us).

    Zero at or below threshold, linear up to saturation, one above.
    """
    if u_f < 0.0:
        raise ValueError("pulse width must be nonnegative")
    if u_f <= p.u_thr:
        return 0.0
    if u_f >= p.u_sat:
        return 1.0
    return (u_f - p.u_thr) / (p.u_sat - p.u_thr)


def rho(f: float, p: FatigueParams) -> float:
    """Stimulation-frequency shaping of the fatigue drive, defined for f < 100 Hz."""
    if not 0.0 <= f < 100.0:
        raise ValueError("stimulation frequency must lie in [0, 100) Hz")
    return 1.0 - p.beta + p.beta * (f / 100.0) ** 2


def _check_dt(dt: float) -> None:
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}] s, got {dt}")


def step_activation(state: MuscleState, e: float, dt: float, p: FatigueParams) -> MuscleState:
    """Advance the activation lag one tick under constant excitation.

    The lag T_e*T*a'' + (T_e+T)*a' + a = e factors into two first-order poles
    at -1/T_e and -1/T, so the step is taken with the exact constant-input
    solution: unconditionally stable for any dt (T_e down to a few ms makes
    explicit integrators blow up at a 10 ms tick). T switches between rise
    and fall on the sign of e - a at the start of the step only.
    """
    _check_dt(dt)
    T = p.T_rise if e > state.a else p.T_fall
    a0 = state.a - e
    v0 = state.a_dot

    # the poles depend symmetrically on the pair {T_e, T}; drop vanished ones
    taus = sorted(t for t in (p.T_e, T) if t > 1e-9)
    if not taus:
        a1, v1 = e, 0.0
    elif len(taus) == 1:
        tau = taus[0]
        d = a0 * math.exp(-dt / tau)
        a1 = e + d
        v1 = -d / tau
    elif abs(taus[0] - taus[1]) < 1e-9 * taus[1]:
        s = -1.0 / taus[1]
        c2 = v0 - s * a0
        g = math.exp(s * dt)
        a1 = e + (a0 + c2 * dt) * g
        v1 = (c2 + s * (a0 + c2 * dt)) * g
    else:
        s1, s2 = -1.0 / taus[0], -1.0 / taus[1]
        c1 = (a0 * s2 - v0) / (s2 - s1)
        c2 = (v0 - a0 * s1) / (s2 - s1)
        g1, g2 = math.exp(s1 * dt), math.exp(s2 * dt)
        a1 = e + c1 * g1 + c2 * g2
        v1 = c1 * s1 * g1 + c2 * s2 * g2

    if a1 > 1.0:
        a1, v1 = 1.0, min(v1, 0.0)
    elif a1 < 0.0:
        a1, v1 = 0.0, max(v1, 0.0)
    return replace(state, a=a1, a_dot=v1, e=e)


def fitness_rate(mu: float, load: float, p: FatigueParams) -> float:
    """Fitness ODE right-hand side for a given drive load = rho(f) * a_f."""
    return (p.mu_min - mu) * load / p.T_fat + (1.0 - mu) * (1.0 - load) / p.T_rec


def fitness_step(mu: float, load: float, dt: float, p: FatigueParams) -> float:
    """One RK4 step of the fitness ODE with the drive held constant, clamped."""
    _check_dt(dt)
    k1 = fitness_rate(mu, load, p)
    k2 = fitness_rate(mu + 0.5 * dt * k1, load, p)
    k3 = fitness_rate(mu + 0.5 * dt * k2, load, p)
    k4 = fitness_rate(mu + dt * k3, load, p)
    mu1 = mu + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return min(max(mu1, p.mu_min), 1.0)


def step_fitness(state: MuscleState, f: float, dt: float, p: FatigueParams) -> MuscleState:
    """Advance fitness one tick, driving the ODE with the current a_f = a * mu."""
    load = rho(f, p) * state.a * state.mu
    return replace(state, mu=fitness_step(state.mu, load, dt, p))
