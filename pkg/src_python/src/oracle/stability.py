"""Stability classification from the spectrum of the potential matrix."""

from typing import Optional

import numpy as np
from scipy import linalg, optimize

from ..bch.models import SystemSpec
from ..spectral.density import discretize, with_coupling
from ..spectral.models import DiscretizedBath, GridConfig, OhmicFamily, SpectralDensity
from ..spectral.stability import ohmic_critical_coupling
from ..utils.errors import DomainError
from ..utils.logger import setup_logger
from .exact import build_potential_matrix, normal_modes
from .models import CriticalCouplingEstimate, PotentialMatrix, StabilityClass, StabilityReport

logger = setup_logger(__name__)

CLASSIFICATION_RELATIVE = 1e-6


def discrete_criterion(system: SystemSpec, bath: DiscretizedBath) -> np.ndarray:
    """4 sum_k g_ik^2/(Omega_i w_k) for every system oscillator."""
    return 4.0 * np.sum(bath.couplings**2 / bath.omegas[None, :], axis=1) / system.omegas


def classify_stability(
    potential: PotentialMatrix,
    system: SystemSpec,
    bath: DiscretizedBath,
    spec: Optional[SpectralDensity] = None,
) -> StabilityReport:
    """
    Classify V by its lowest eigenvalue.

    Unstable when min eig < -tol, Marginal when |min eig| <= tol, Stable otherwise,
    with tol = 1e-6 x largest diagonal entry.

    Args:
        potential: Output of build_potential_matrix(system, bath)
        system: System oscillators
        bath: Discretized bath
        spec: Spectral density; for OhmicFamily the closed-form eta_M is attached

    Returns:
        StabilityReport
    """
    modes = normal_modes(potential)
    eigenvalues = np.sort(np.array(modes.eigenvalues))
    tolerance = CLASSIFICATION_RELATIVE * potential.max_diagonal
    lowest = float(eigenvalues[0])

    if lowest < -tolerance:
        classification = StabilityClass.UNSTABLE
    elif abs(lowest) <= tolerance:
        classification = StabilityClass.MARGINAL
    else:
        classification = StabilityClass.STABLE

    criteria = discrete_criterion(system, bath)
    eta_critical = None
    if isinstance(spec, OhmicFamily):
        eta_critical = ohmic_critical_coupling(spec, system.omega0)

    logger.debug(
        f"V spectrum: min={lowest:.6e}, tol={tolerance:.3e} -> {classification.value}; "
        f"criterion={float(criteria[0]):.6f}"
    )
    return StabilityReport(
        eigenvalues=eigenvalues,
        classification=classification,
        discrete_criterion=float(np.max(criteria)),
        tolerance=tolerance,
        eta_critical_estimate=eta_critical,
        criteria=criteria,
    )


def _min_eigenvalue(system: SystemSpec, bath: DiscretizedBath) -> float:
    entries = build_potential_matrix(system, bath).entries
    value = linalg.eigh(entries, eigvals_only=True, subset_by_index=[0, 0])
    return float(value[0])


def locate_critical_coupling(
    system: SystemSpec,
    spec: SpectralDensity,
    grid: GridConfig,
    xtol: float = 1e-12,
) -> CriticalCouplingEstimate:
    """
    Find the coupling where min eig(V) crosses zero on a fixed grid.

    Couplings scale as sqrt(eta), so the bath is discretized once at unit
    coupling and rescaled. The root is bracketed around the value where the
    discrete criterion equals one.

    Args:
        system: System oscillators
        spec: Ohmic or Lorentzian density (its own coupling value is ignored)
        grid: Discretization grid
        xtol: Absolute tolerance on eta

    Returns:
        CriticalCouplingEstimate

    Raises:
        DomainError: If the unit-coupling bath has zero criterion
    """
    unit_bath = discretize(with_coupling(spec, 1.0), grid, n_systems=system.n_systems)
    unit_criterion = float(np.max(discrete_criterion(system, unit_bath)))
    if unit_criterion <= 0:
        raise DomainError("bath has no coupling weight; no critical coupling exists")
    eta_criterion = 1.0 / unit_criterion

    def lowest(eta: float) -> float:
        return _min_eigenvalue(system, unit_bath.scaled(np.sqrt(eta)))

    lower, upper = 0.5 * eta_criterion, 2.0 * eta_criterion
    while lowest(lower) < 0:
        lower *= 0.5
    while lowest(upper) > 0:
        upper *= 2.0

    root = optimize.brentq(lowest, lower, upper, xtol=xtol, rtol=4 * np.finfo(float).eps)
    logger.info(
        f"Critical coupling on {grid.n_modes} modes: eigenvalue root {root:.10f}, "
        f"criterion {eta_criterion:.10f}"
    )
    return CriticalCouplingEstimate(
        eta_eigenvalue=float(root),
        eta_criterion=float(eta_criterion),
        min_eigenvalue_at_root=lowest(root),
    )
