"""Hybrid exoskeleton + FES gait assistance: simulator, controllers, calibration."""

__version__ = "0.1.0"

from .exo import ExoGains, exo_torque, make_exo_gains, update_stiffness
from .fes import (
    FesGains,
    MuscleChannel,
    fes_band_radius,
    make_fes_gains,
    muscle_error,
    stimulation,
    update_gamma,
)
from .fsm import CycleEnded, PhaseAccumulator, PhaseEnded, classify_phase
from .muscle import (
    DEFAULT_FATIGUE_PARAMS,
    FatigueParams,
    MuscleState,
    excitation,
    rho,
    step_activation,
    step_fitness,
)
from .path import (
    BandedError,
    ReferencePath,
    banded_error,
    default_gait_path,
    load_path_file,
    nearest_reference,
    soft_threshold,
)
from .plant import (
    JointTorques,
    LegState,
    PlantParams,
    TorqueMapEntry,
    VoluntaryProfile,
    fes_torque,
    inverse_dynamics,
    mechanical_energy,
    step_dynamics,
    voluntary_profile,
)
