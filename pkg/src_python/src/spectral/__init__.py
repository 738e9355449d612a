"""Spectral densities, bath discretization and the continuum stability analysis."""

from .density import (
    characteristic_frequency,
    coupling_strength,
    discretize,
    evaluate_density,
    resolve_omega_max,
    total_coupling,
    with_coupling,
)
from .models import (
    DiscretizedBath,
    GridConfig,
    GridScheme,
    Lorentzian,
    LorentzianNormalization,
    OhmicFamily,
    SpectralDensity,
    SpectralFamily,
    Tabulated,
)
from .stability import (
    StabilityIntegral,
    critical_coupling,
    ohmic_critical_coupling,
    stability_integral,
)

__all__ = [
    "SpectralFamily",
    "GridScheme",
    "LorentzianNormalization",
    "OhmicFamily",
    "Lorentzian",
    "Tabulated",
    "SpectralDensity",
    "GridConfig",
    "DiscretizedBath",
    "evaluate_density",
    "characteristic_frequency",
    "coupling_strength",
    "with_coupling",
    "resolve_omega_max",
    "discretize",
    "total_coupling",
    "StabilityIntegral",
    "stability_integral",
    "critical_coupling",
    "ohmic_critical_coupling",
]
