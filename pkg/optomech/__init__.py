"""
optomech - Single-Photon Optomechanical Interferometer Simulator

Exact open-system dynamics of one photon driving a cavity with a movable
mirror, the fringe visibility of a Michelson interferometer built around it,
and conditional preparation of mirror states at the dark port.

Core Components:
- fock_core: Truncated Fock-space states, displacement and evolution operators
- waveforms: Ingoing photon waveforms
- open_dynamics: Outgoing and in-cavity joint states, probability audits
- interferometer: Arm states, detection probability and visibility
- state_prep: Preparation waveforms, fidelity windows, success probabilities
- feasibility: Laboratory units and experimental requirements
- sweep: Deterministic parallel parameter sweeps
- storage: CSV/JSON table output
"""

__version__ = "1.0.0"
__author__ = "optomech developers"

from .models import (
    ValidationError,
    DomainError,
    NumericalError,
    TruncationMode,
    TruncationPolicy,
    QuadratureConfig,
    SystemParams,
    OptimizerConfig,
    TargetState,
    PrepReport,
    SweepTable,
    validate_finite,
    validate_positive_number,
    validate_non_negative_integer,
    validate_probability,
)
from .config import SimulationConfig
from .fock_core import (
    FockVector,
    TruncationError,
    DisplacedFrame,
    coherent_state,
    coherent_fock_overlap,
    displacement_operator,
    displaced_fock,
    free_phases,
    photon_present_evolution,
)
from .waveforms import PhotonWaveform, ExponentialDecay, FockPrep, ModulatedPrep, Sampled
from .quadrature import QuadratureError, integrate
from .open_dynamics import (
    CavityPropagator,
    BoundarySeries,
    JointStateSnapshot,
    green_prompt_and_tail,
    reflection_amplitude,
    out_state,
    in_cavity_state,
    in_cavity_series,
    out_state_series,
    probability_audit,
    joint_snapshot,
)
from .interferometer import (
    ArmOverlaps,
    UndefinedVisibilityError,
    arm_states,
    probability_density,
    p_extrema,
    visibility,
    visibility_series,
)
from .state_prep import (
    OPTIMAL_GAMMA_OVER_OMEGA,
    ConditionalResult,
    SubspaceMinimum,
    SubspaceObjective,
    DegenerateTargetError,
    NongenericTargetError,
    DivergentCoefficientsError,
    OptimizerError,
    bandwidth_factor,
    fock_prep_waveform,
    conditional_state,
    circle_integral,
    fidelity_window_fock,
    success_probability_fock,
    tilde_coefficients,
    normalization_z,
    arbitrary_prep_waveform,
    success_probability_state,
    min_success_over_subspace,
    subspace_minima,
)
from .feasibility import (
    PhysicalParams,
    FeasibilityReport,
    RequirementCheck,
    derive_dimensionless,
    requirements_report,
)
from .parallel_executor import ParallelExecutor, ExecutionResult
from .sweep import Observable, SweepSpec, SweepExecutor, run_sweep
from .storage import StorageError, emit, load_table

__all__ = [
    # Models and errors
    "ValidationError",
    "DomainError",
    "NumericalError",
    "TruncationError",
    "QuadratureError",
    "UndefinedVisibilityError",
    "DegenerateTargetError",
    "NongenericTargetError",
    "DivergentCoefficientsError",
    "OptimizerError",
    "StorageError",
    "TruncationMode",
    "TruncationPolicy",
    "QuadratureConfig",
    "SystemParams",
    "OptimizerConfig",
    "TargetState",
    "PrepReport",
    "SweepTable",
    "SimulationConfig",
    "validate_finite",
    "validate_positive_number",
    "validate_non_negative_integer",
    "validate_probability",
    # Fock space
    "FockVector",
    "DisplacedFrame",
    "coherent_state",
    "coherent_fock_overlap",
    "displacement_operator",
    "displaced_fock",
    "free_phases",
    "photon_present_evolution",
    # Waveforms and dynamics
    "PhotonWaveform",
    "ExponentialDecay",
    "FockPrep",
    "ModulatedPrep",
    "Sampled",
    "integrate",
    "CavityPropagator",
    "BoundarySeries",
    "JointStateSnapshot",
    "green_prompt_and_tail",
    "reflection_amplitude",
    "out_state",
    "in_cavity_state",
    "in_cavity_series",
    "out_state_series",
    "probability_audit",
    "joint_snapshot",
    # Interferometer
    "ArmOverlaps",
    "arm_states",
    "probability_density",
    "p_extrema",
    "visibility",
    "visibility_series",
    # State preparation
    "OPTIMAL_GAMMA_OVER_OMEGA",
    "ConditionalResult",
    "SubspaceMinimum",
    "SubspaceObjective",
    "bandwidth_factor",
    "fock_prep_waveform",
    "conditional_state",
    "circle_integral",
    "fidelity_window_fock",
    "success_probability_fock",
    "tilde_coefficients",
    "normalization_z",
    "arbitrary_prep_waveform",
    "success_probability_state",
    "min_success_over_subspace",
    "subspace_minima",
    # Feasibility
    "PhysicalParams",
    "FeasibilityReport",
    "RequirementCheck",
    "derive_dimensionless",
    "requirements_report",
    # Sweeps and output
    "ParallelExecutor",
    "ExecutionResult",
    "Observable",
    "SweepSpec",
    "SweepExecutor",
    "run_sweep",
    "emit",
    "load_table",
]
