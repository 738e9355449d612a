"""Exact diagonalization oracle and stability classification."""

from .exact import (
    build_potential_matrix,
    exact_propagator,
    exact_system_rows,
    normal_modes,
    phase_space_energy,
    phase_space_propagator,
)
from .models import (
    CriticalCouplingEstimate,
    NormalModes,
    PotentialMatrix,
    StabilityClass,
    StabilityReport,
)
from .stability import classify_stability, discrete_criterion, locate_critical_coupling

__all__ = [
    "PotentialMatrix",
    "NormalModes",
    "StabilityClass",
    "StabilityReport",
    "CriticalCouplingEstimate",
    "build_potential_matrix",
    "normal_modes",
    "phase_space_propagator",
    "phase_space_energy",
    "exact_propagator",
    "exact_system_rows",
    "classify_stability",
    "discrete_criterion",
    "locate_critical_coupling",
]
