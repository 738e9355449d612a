"""Evaluation and discretization of spectral densities."""

import dataclasses
from typing import Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from ..utils.errors import ConfigurationError, DomainError
from ..utils.logger import setup_logger
from .models import (
    DiscretizedBath,
    GridConfig,
    GridScheme,
    Lorentzian,
    LorentzianNormalization,
    OhmicFamily,
    SpectralDensity,
    Tabulated,
)

logger = setup_logger(__name__)

ArrayOrFloat = Union[float, np.ndarray]


def _check_spec(spec: SpectralDensity) -> None:
    errors = spec.validate()
    if errors:
        raise ConfigurationError(errors)


def evaluate_density(spec: SpectralDensity, omega: ArrayOrFloat) -> ArrayOrFloat:
    """
    Evaluate J(omega) for a spectral density.

    Args:
        spec: Spectral density
        omega: Frequency or array of frequencies, all >= 0

    Returns:
        J(omega), same shape as omega

    Raises:
        DomainError: If any omega is negative
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError(f"spectral density is defined for omega >= 0 (got min {w.min()})")

    if isinstance(spec, OhmicFamily):
        # w (w/wc)^(s-1) written as wc (w/wc)^s so that w = 0 is finite for s < 1
        x = w / spec.omega_c
        value = 2.0 * np.pi * spec.eta * spec.omega_c * np.power(x, spec.s) * np.exp(-x)
    elif isinstance(spec, Lorentzian):
        denominator = (w - spec.Omega) ** 2 + spec.Gamma**2
        if spec.normalization is LorentzianNormalization.AREA:
            value = 2.0 * spec.strength * spec.Gamma / denominator
        else:
            value = spec.strength * spec.Gamma**2 / denominator
    elif isinstance(spec, Tabulated):
        value = np.interp(w, spec.omegas, spec.values, left=0.0, right=0.0)
    else:
        raise TypeError(f"Unknown spectral density type: {type(spec).__name__}")

    if np.ndim(omega) == 0:
        return float(value)
    return value


def characteristic_frequency(spec: SpectralDensity) -> float:
    """Frequency scale used for default grids and quadrature sampling."""
    if isinstance(spec, OhmicFamily):
        return float(spec.omega_c)
    if isinstance(spec, Lorentzian):
        return float(spec.Omega)
    if isinstance(spec, Tabulated):
        return float(spec.omegas[-1]) / 10.0
    raise TypeError(f"Unknown spectral density type: {type(spec).__name__}")


def coupling_strength(spec: SpectralDensity) -> float:
    """The family's overall coupling parameter (eta or strength)."""
    if isinstance(spec, OhmicFamily):
        return float(spec.eta)
    if isinstance(spec, Lorentzian):
        return float(spec.strength)
    raise TypeError(f"{type(spec).__name__} has no scalar coupling parameter")


def with_coupling(spec: SpectralDensity, value: float) -> SpectralDensity:
    """Copy of spec with eta (Ohmic) or strength (Lorentzian) replaced."""
    if isinstance(spec, OhmicFamily):
        return dataclasses.replace(spec, eta=float(value))
    if isinstance(spec, Lorentzian):
        return dataclasses.replace(spec, strength=float(value))
    raise TypeError(f"{type(spec).__name__} has no scalar coupling parameter")


def resolve_omega_max(spec: SpectralDensity, grid: GridConfig) -> float:
    """Upper grid edge, defaulting to ten times the characteristic frequency."""
    if grid.omega_max is not None:
        return float(grid.omega_max)
    return 10.0 * characteristic_frequency(spec)


def discretize(spec: SpectralDensity, grid: GridConfig, n_systems: int = 1) -> DiscretizedBath:
    """
    Discretize a spectral density into a finite set of bath modes.

    Mode k gets g_k^2 = J(w_k) dw_k / (2 pi), where dw_k is the midpoint cell width
    or the Gauss-Legendre weight.

    Args:
        spec: Spectral density
        grid: Grid configuration
        n_systems: Number of system oscillators; every one couples with the same g_k

    Returns:
        DiscretizedBath with strictly increasing positive frequencies

    Raises:
        ConfigurationError: If spec or grid is invalid (including n_modes = 0)
    """
    _check_spec(spec)
    errors = grid.validate()
    if errors:
        raise ConfigurationError(errors)

    omega_min = float(grid.omega_min)
    omega_max = resolve_omega_max(spec, grid)
    if not omega_max > omega_min:
        raise ConfigurationError([f"grid.omega_max {omega_max} must exceed omega_min {omega_min}"])
    n = int(grid.n_modes)

    spacing: Optional[float] = None
    if grid.scheme is GridScheme.LINEAR_MIDPOINT:
        edges = np.linspace(omega_min, omega_max, n + 1)
        nodes = 0.5 * (edges[1:] + edges[:-1])
        weights = np.diff(edges)
        spacing = (omega_max - omega_min) / n
    else:
        x, w = leggauss(n)
        half = 0.5 * (omega_max - omega_min)
        nodes = omega_min + half * (x + 1.0)
        weights = half * w

    density = np.asarray(evaluate_density(spec, nodes))
    g = np.sqrt(density * weights / (2.0 * np.pi))

    logger.debug(
        f"Discretized {type(spec).__name__} into {n} modes on [{omega_min}, {omega_max}] "
        f"({grid.scheme.value}), sum g^2 = {np.sum(g**2):.6e}"
    )

    return DiscretizedBath(
        omegas=nodes,
        couplings=np.tile(g, (n_systems, 1)),
        weights=weights,
        scheme=grid.scheme,
        spacing=spacing,
        metadata={"omega_min": omega_min, "omega_max": omega_max},
    )


def total_coupling(
    spec: SpectralDensity, omega_min: float = 0.0, omega_max: Optional[float] = None
) -> float:
    """
    Continuum counterpart of sum_k g_k^2, i.e. the integral of J/(2 pi).

    Args:
        spec: Spectral density
        omega_min: Lower integration limit
        omega_max: Upper integration limit (None means effectively infinite)

    Returns:
        Integral of J(w) dw / (2 pi) over [omega_min, omega_max]
    """
    _check_spec(spec)
    if isinstance(spec, Tabulated):
        upper = spec.omegas[-1] if omega_max is None else min(omega_max, spec.omegas[-1])
        nodes = np.unique(
            np.concatenate(([omega_min, upper], spec.omegas[(spec.omegas > omega_min)
                                                            & (spec.omegas < upper)]))
        )
        values = np.asarray(evaluate_density(spec, nodes))
        return float(integrate.trapezoid(values, nodes) / (2.0 * np.pi))

    upper = omega_max if omega_max is not None else np.inf
    # split at the Lorentzian centre so the narrow peak is never stepped over
    edges = [omega_min, upper]
    if isinstance(spec, Lorentzian) and omega_min < spec.Omega < upper:
        edges = [omega_min, spec.Omega, upper]

    value = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(
            lambda w: evaluate_density(spec, w), lo, hi, epsabs=1e-12, epsrel=1e-12, limit=400
        )
        value += piece
    return float(value / (2.0 * np.pi))
