"""Surrogate leg plant: planar hip+knee chain under voluntary, muscle and robot torques.

One leg is a two-link pendulum hanging from a fixed hip (no pelvis coupling,
no ground contact). Coordinates are hip flexion from the downward vertical and
knee flexion (shank folding backward), both positive in flexion, matching the
reference-path convention. Muscle torques come from a simple activation *
torque-angle map instead of full musculotendon models; voluntary behaviour is
a scripted, scaled inverse-dynamics torque of the reference path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fes import MuscleChannel
from .path import ReferencePath


@dataclass
class PlantParams:
    """Segment and joint parameters of the surrogate leg (anthropometric defaults)."""

    thigh_length: float = 0.42
    thigh_mass: float = 8.1
    thigh_com_frac: float = 0.45
    shank_length: float = 0.46
    shank_mass: float = 4.8
    shank_com_frac: float = 0.45
    gravity: float = 9.81
    # passive viscous joint friction, Nm s/rad
    hip_damping: float = 3.0
    knee_damping: float = 1.5
    hip_limits: tuple[float, float] = (math.radians(-30.0), math.radians(120.0))
    knee_limits: tuple[float, float] = (math.radians(0.0), math.radians(140.0))

    def __post_init__(self):
        if min(self.thigh_length, self.shank_length, self.thigh_mass, self.shank_mass) <= 0.0:
            raise ValueError("segment lengths and masses must be positive")
        if self.hip_damping < 0.0 or self.knee_damping < 0.0:
            raise ValueError("joint damping must be nonnegative")


@dataclass
class LegState:
    """Joint angles (rad) and velocities (rad/s), order (hip, knee)."""

    q: np.ndarray = field(default_factory=lambda: np.zeros(2))
    qdot: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def copy(self) -> "LegState":
        return LegState(q=self.q.copy(), qdot=self.qdot.copy())


@dataclass
class JointTorques:
    """Torque decomposition per joint (hip, knee), Nm."""

    voluntary: np.ndarray
    fes: np.ndarray
    exo: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.voluntary + self.fes + self.exo


@dataclass
class TorqueMapEntry:
    """Surrogate strength of one muscle: peak torque and optimal joint angle."""

    tau_max: float
    q_opt: float

    def __post_init__(self):
        if self.tau_max <= 0.0:
            raise ValueError("tau_max must be positive")


# keyed by muscle channel name
MuscleTorqueMap = dict[str, TorqueMapEntry]


def fes_torque(channel: MuscleChannel, entry: TorqueMapEntry, q_joint: float) -> float:
    """Joint torque (Nm) this muscle currently produces.

    Effective activation times peak torque, shaped by a cosine torque-angle
    factor (floored at zero); flexors pull positive, extensors negative.
    """
    sign = 1.0 if channel.action == "flexor" else -1.0
    scaling = max(0.0, math.cos(q_joint - entry.q_opt))
    return sign * channel.state.effective_activation * entry.tau_max * scaling


def _dynamics_terms(q1, q2, qd1, qd2, p: PlantParams):
    """Mass matrix entries and bias (Coriolis + gravity) in (hip, knee) coordinates."""
    r1 = p.thigh_com_frac * p.thigh_length
    r2 = p.shank_com_frac * p.shank_length
    l1 = p.thigh_length
    m1, m2, g = p.thigh_mass, p.shank_mass, p.gravity

    # absolute segment angles from vertical: thigh q1, shank q1 - q2
    th2 = q1 - q2
    thd1 = qd1
    thd2 = qd1 - qd2
    cq2 = math.cos(q2)
    sq2 = math.sin(q2)

    a11 = m1 * r1 * r1 + m2 * l1 * l1
    a12 = m2 * l1 * r2 * cq2
    a22 = m2 * r2 * r2

    # fold the absolute-angle model through theta = J q, J = [[1, 0], [1, -1]]
    m_11 = a11 + 2.0 * a12 + a22
    m_12 = -(a12 + a22)
    m_22 = a22

    c_th1 = m2 * l1 * r2 * sq2 * thd2 * thd2
    c_th2 = -m2 * l1 * r2 * sq2 * thd1 * thd1
    g_th1 = (m1 * r1 + m2 * l1) * g * math.sin(q1)
    g_th2 = m2 * r2 * g * math.sin(th2)

    bias1 = (c_th1 + g_th1) + (c_th2 + g_th2)
    bias2 = -(c_th2 + g_th2)
    return m_11, m_12, m_22, bias1, bias2


def forward_accel(q: np.ndarray, qdot: np.ndarray, tau: np.ndarray, p: PlantParams) -> np.ndarray:
    """Joint accelerations for given torques, including viscous friction."""
    q1, q2 = float(q[0]), float(q[1])
    qd1, qd2 = float(qdot[0]), float(qdot[1])
    m11, m12, m22, b1, b2 = _dynamics_terms(q1, q2, qd1, qd2, p)
    rhs1 = float(tau[0]) - b1 - p.hip_damping * qd1
    rhs2 = float(tau[1]) - b2 - p.knee_damping * qd2
    det = m11 * m22 - m12 * m12
    return np.array([(m22 * rhs1 - m12 * rhs2) / det, (m11 * rhs2 - m12 * rhs1) / det])


def inverse_dynamics(q: np.ndarray, qdot: np.ndarray, qddot: np.ndarray, p: PlantParams) -> np.ndarray:
    """Joint torques that realize the given accelerations (friction included)."""
    q1, q2 = float(q[0]), float(q[1])
    qd1, qd2 = float(qdot[0]), float(qdot[1])
    m11, m12, m22, b1, b2 = _dynamics_terms(q1, q2, qd1, qd2, p)
    t1 = m11 * float(qddot[0]) + m12 * float(qddot[1]) + b1 + p.hip_damping * qd1
    t2 = m12 * float(qddot[0]) + m22 * float(qddot[1]) + b2 + p.knee_damping * qd2
    return np.array([t1, t2])


def mechanical_energy(state: LegState, p: PlantParams) -> float:
    """Kinetic plus gravitational potential energy (J), zero datum at the hip."""
    q1, q2 = float(state.q[0]), float(state.q[1])
    qd1, qd2 = float(state.qdot[0]), float(state.qdot[1])
    r1 = p.thigh_com_frac * p.thigh_length
    r2 = p.shank_com_frac * p.shank_length
    th2 = q1 - q2
    thd1 = qd1
    thd2 = qd1 - qd2
    a11 = p.thigh_mass * r1 * r1 + p.shank_mass * p.thigh_length * p.thigh_length
    a12 = p.shank_mass * p.thigh_length * r2 * math.cos(q2)
    a22 = p.shank_mass * r2 * r2
    ke = 0.5 * (a11 * thd1 * thd1 + 2.0 * a12 * thd1 * thd2 + a22 * thd2 * thd2)
    y1 = -r1 * math.cos(q1)
    y2 = -p.thigh_length * math.cos(q1) - r2 * math.cos(th2)
    pe = p.gravity * (p.thigh_mass * y1 + p.shank_mass * y2)
    return ke + pe


def step_dynamics(state: LegState, torques: JointTorques, dt: float, p: PlantParams) -> LegState:
    """One fixed-step RK4 integration of the leg under zero-order-hold torques.

    Joint limits are enforced afterwards: the angle is clamped and any velocity
    still pushing into the stop is zeroed.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    tau = torques.total

    def deriv(q, qdot):
        return qdot, forward_accel(q, qdot, tau, p)

    q0, v0 = state.q, state.qdot
    k1q, k1v = deriv(q0, v0)
    k2q, k2v = deriv(q0 + 0.5 * dt * k1q, v0 + 0.5 * dt * k1v)
    k3q, k3v = deriv(q0 + 0.5 * dt * k2q, v0 + 0.5 * dt * k2v)
    k4q, k4v = deriv(q0 + dt * k3q, v0 + dt * k3v)
    q = q0 + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    v = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

    for j, (lo, hi) in enumerate((p.hip_limits, p.knee_limits)):
        if q[j] <= lo:
            q[j] = lo
            if v[j] < 0.0:
                v[j] = 0.0
        elif q[j] >= hi:
            q[j] = hi
            if v[j] > 0.0:
                v[j] = 0.0
    return LegState(q=q, qdot=v)


@dataclass
class VoluntaryProfile:
    """Scripted per-joint torque over the gait cycle.

    Built as the inverse-dynamics torque of the reference path walked at a
    nominal cadence, scaled down (tracking deficit) and shifted by a small
    phase lag. torque() interpolates periodically.
    """

    label: str
    phase_grid: np.ndarray
    torque_grid: np.ndarray  # (n, 2), scale already applied
    phase_lag: float

    def torque(self, phi: float) -> np.ndarray:
        x = (float(phi) - self.phase_lag) % 1.0
        n = self.phase_grid.shape[0]
        pos = x * n
        i = int(pos) % n
        frac = pos - int(pos)
        j = (i + 1) % n
        return (1.0 - frac) * self.torque_grid[i] + frac * self.torque_grid[j]


def voluntary_profile(
    path: ReferencePath,
    plant: PlantParams,
    cycle_period: float,
    scale: float,
    phase_lag: float,
    label: str,
    n_grid: int = 400,
) -> VoluntaryProfile:
    """Construct the scripted behaviour for one tracking-quality level."""
    if cycle_period <= 0.0:
        raise ValueError("cycle period must be positive")
    if not 0.0 <= scale <= 2.0:
        raise ValueError("implausible voluntary torque scale")
    phi = np.arange(n_grid, dtype=float) / n_grid
    q = np.array([path.point_at_phase(x) for x in phi])
    dphi = 1.0 / n_grid
    qp = (np.roll(q, -1, axis=0) - np.roll(q, 1, axis=0)) / (2.0 * dphi)
    qpp = (np.roll(q, -1, axis=0) - 2.0 * q + np.roll(q, 1, axis=0)) / (dphi * dphi)
    qdot = qp / cycle_period
    qddot = qpp / (cycle_period * cycle_period)
    tau = np.array(
        [inverse_dynamics(q[i], qdot[i], qddot[i], plant) for i in range(n_grid)]
    )
    return VoluntaryProfile(
        label=label, phase_grid=phi, torque_grid=scale * tau, phase_lag=phase_lag
    )
