"""Continuum stability integral and closed-form critical couplings."""

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy import integrate, special

from ..utils.errors import ConfigurationError, DomainError
from ..utils.logger import setup_logger
from .density import characteristic_frequency, evaluate_density
from .models import Lorentzian, OhmicFamily, SpectralDensity, Tabulated

logger = setup_logger(__name__)

QUAD_EPSABS = 1e-10
TAIL_RELATIVE = 1e-16
FLOOR_START = 1e-3  # first floor tried, in units of the characteristic frequency
DIVERGENCE_RELATIVE = 1e-3
DIVERGENCE_STREAK = 3
STEADY_RATIO = 1e-2  # increments within this of constant per halving mean a 1/w tail
MAX_HALVINGS = 64


@dataclass(frozen=True)
class StabilityIntegral:
    """Result of the continuum stability integral S = 4/(2 pi w0) * int J(w)/w dw."""

    value: Optional[float]
    diverged: bool
    omega_floor: float
    halvings: int = 0

    @property
    def stable(self) -> Optional[bool]:
        """True below 1, False at or above 1, None when the integral diverges."""
        if self.diverged or self.value is None:
            return None
        return self.value < 1.0


def _upper_limit(integrand: Callable[[float], float], scale: float, start: float) -> float:
    """Smallest doubling of 10*scale where the integrand drops below 1e-16 of its peak."""
    samples = np.geomspace(max(start, 1e-6 * scale), 100.0 * scale, 400)
    peak = max(float(np.max([integrand(w) for w in samples])), 0.0)
    if peak == 0.0:
        return 10.0 * scale

    upper = max(10.0 * scale, 2.0 * start)
    while integrand(upper) >= TAIL_RELATIVE * peak and upper < 1e4 * scale:
        upper *= 2.0
    return upper


def _integrate(spec: SpectralDensity, lower: float, upper: float) -> float:
    """int_lower^upper J(w)/w dw."""

    def integrand(w: float) -> float:
        return evaluate_density(spec, w) / w if w > 0 else 0.0

    breakpoints: List[float] = []
    if isinstance(spec, Lorentzian):
        breakpoints = [spec.Omega]
    elif isinstance(spec, Tabulated):
        breakpoints = list(spec.omegas)

    edges = [lower] + sorted(b for b in breakpoints if lower < b < upper) + [upper]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(integrand, lo, hi, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
        total += piece
    return total


def stability_integral(
    spec: SpectralDensity, omega0: float, omega_floor: float = 0.0
) -> StabilityIntegral:
    """
    Evaluate S = 4/(2 pi w0) * int_{floor}^inf J(w)/w dw.

    S < 1 means the continuum model is stable, S = 1 critical, S > 1 unstable.
    With omega_floor = 0 the floor is halved from 1e-3 x characteristic frequency
    until the increments shrink geometrically (any steady ratio below 0.99, so
    power-law tails w^s with small s converge; the value is then taken from 0) or
    three consecutive halvings each add more than 1e-3 relative with the increment
    ratio at 0.99 or above, the signature of a 1/w integrand (divergent).

    Args:
        spec: Spectral density
        omega0: System frequency (> 0)
        omega_floor: Lower integration limit (>= 0)

    Returns:
        StabilityIntegral; value is None when the integral diverges

    Raises:
        DomainError: If omega0 <= 0 or omega_floor < 0
    """
    errors = spec.validate()
    if errors:
        raise ConfigurationError(errors)
    if not omega0 > 0:
        raise DomainError(f"omega0 must be > 0 (got {omega0})")
    if omega_floor < 0:
        raise DomainError(f"omega_floor must be >= 0 (got {omega_floor})")

    prefactor = 4.0 / (2.0 * np.pi * omega0)
    scale = characteristic_frequency(spec)

    def integrand(w: float) -> float:
        return evaluate_density(spec, w) / w if w > 0 else 0.0

    upper = _upper_limit(integrand, scale, max(omega_floor, 1e-12 * scale))
    if isinstance(spec, Tabulated):
        upper = max(upper, float(spec.omegas[-1]))

    if omega_floor > 0:
        value = prefactor * _integrate(spec, omega_floor, upper)
        return StabilityIntegral(value=value, diverged=False, omega_floor=omega_floor)

    floor = FLOOR_START * scale
    previous = _integrate(spec, floor, upper)
    previous_increment: Optional[float] = None
    growing = 0
    shrinking = 0

    for halving in range(1, MAX_HALVINGS + 1):
        floor *= 0.5
        current = _integrate(spec, floor, upper)
        increment = current - previous
        relative = abs(increment) / abs(current) if current else 0.0

        if relative < 1e-12:
            shrinking = DIVERGENCE_STREAK
        elif previous_increment:
            ratio = increment / previous_increment
            if ratio < 1.0 - STEADY_RATIO:
                shrinking += 1
                growing = 0
            elif relative > DIVERGENCE_RELATIVE:
                growing += 1
                shrinking = 0
            else:
                growing = 0
                shrinking = 0

        if growing >= DIVERGENCE_STREAK:
            logger.warning(
                f"Stability integral diverges as omega_floor -> 0 "
                f"(still growing {relative:.2e} per halving at floor {floor:.3e})"
            )
            return StabilityIntegral(
                value=None, diverged=True, omega_floor=floor, halvings=halving
            )

        if shrinking >= DIVERGENCE_STREAK:
            value = prefactor * _integrate(spec, 0.0, upper)
            logger.debug(f"Stability integral converged after {halving} halvings: S = {value:.10f}")
            return StabilityIntegral(value=value, diverged=False, omega_floor=0.0, halvings=halving)

        previous_increment = increment
        previous = current

    logger.warning(
        f"Stability integral did not settle after {MAX_HALVINGS} halvings "
        f"(floor {floor:.3e}); reporting divergence"
    )
    return StabilityIntegral(value=None, diverged=True, omega_floor=floor, halvings=MAX_HALVINGS)


def critical_coupling(s: float, omega_c: float, omega0: float) -> float:
    """
    Closed-form critical coupling of the Ohmic family.

    eta_M = w0 / (4 w_c Gamma(s)), where S(eta_M) = 1.

    Args:
        s: Ohmic exponent (> 0)
        omega_c: Cutoff frequency (> 0)
        omega0: System frequency (> 0)

    Returns:
        Critical coupling eta_M

    Raises:
        DomainError: For s <= 0 or non-positive frequencies
    """
    if not s > 0:
        raise DomainError(f"critical coupling needs s > 0 (got {s}); the integral diverges")
    if not omega_c > 0 or not omega0 > 0:
        raise DomainError("omega_c and omega0 must be > 0")
    return omega0 / (4.0 * omega_c * float(special.gamma(s)))


def ohmic_critical_coupling(spec: OhmicFamily, omega0: float) -> float:
    """critical_coupling for an OhmicFamily instance."""
    return critical_coupling(spec.s, spec.omega_c, omega0)
