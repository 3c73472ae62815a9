"""Finite-element vibrotactile response of beam-type touch surfaces driven by
multiple base-exciting actuators."""

__version__ = "0.1.0"

from .errors import ConfigError, SolverError, TouchbarError
from .fem import AssembledSystem, Mesh, assemble, build_system, constrain_pinned, element_matrices, generate_mesh
from .modal import ModalResult, analytical_pinned_frequencies, modes, state_matrix
from .model import (
    ActuatorAttachment,
    ActuatorBase,
    BeamGeometry,
    DirectForce,
    Material,
    StudyConfig,
    derived_section,
    material_catalog,
    resolve_damping,
)
from .oracle import compare_trajectories, newmark_integrate
from .response import (
    HarmonicExcitation,
    PeakAccelerationField,
    SteadyState,
    Trajectory,
    acceleration_series,
    base_excitation_forces,
    complete_response,
    peak_acceleration_field,
    steady_state,
)
from .sweep import (
    SampleSet,
    SweepSpec,
    bucket_fractions,
    dead_zones,
    nullification_union,
    preset_configurations,
    quantile_summary,
    run_sweep,
)

__all__ = [
    "ActuatorAttachment",
    "ActuatorBase",
    "AssembledSystem",
    "BeamGeometry",
    "ConfigError",
    "DirectForce",
    "HarmonicExcitation",
    "Material",
    "Mesh",
    "ModalResult",
    "PeakAccelerationField",
    "SampleSet",
    "SolverError",
    "SteadyState",
    "StudyConfig",
    "SweepSpec",
    "TouchbarError",
    "Trajectory",
    "acceleration_series",
    "analytical_pinned_frequencies",
    "assemble",
    "base_excitation_forces",
    "bucket_fractions",
    "build_system",
    "compare_trajectories",
    "complete_response",
    "constrain_pinned",
    "dead_zones",
    "derived_section",
    "element_matrices",
    "generate_mesh",
    "material_catalog",
    "modes",
    "newmark_integrate",
    "nullification_union",
    "peak_acceleration_field",
    "preset_configurations",
    "quantile_summary",
    "resolve_damping",
    "run_sweep",
    "state_matrix",
    "steady_state",
]
