"""Data models for spectral densities and discretized baths."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from ..utils.errors import DomainError


class SpectralFamily(Enum):
    """Supported spectral density families."""

    OHMIC = "ohmic"
    LORENTZIAN = "lorentzian"
    TABULATED = "tabulated"


class GridScheme(Enum):
    """Placement rule for discrete bath modes."""

    LINEAR_MIDPOINT = "linear_midpoint"
    GAUSS_LEGENDRE = "gauss_legendre"


class LorentzianNormalization(Enum):
    """How the Lorentzian strength parameter scales J(omega)."""

    AREA = "area"  # integral of J/(2 pi) equals strength
    HEIGHT = "height"  # J(Omega) equals strength


@dataclass(frozen=True)
class OhmicFamily:
    """J(w) = 2 pi eta w (w/w_c)^(s-1) exp(-w/w_c); s < 1 sub-Ohmic, s > 1 super-Ohmic."""

    s: float = 1.0
    eta: float = 0.1
    omega_c: float = 1.0

    family = SpectralFamily.OHMIC

    def validate(self) -> List[str]:
        """Return a list of invariant violations."""
        errors = []
        if not self.s > 0:
            errors.append(f"Ohmic exponent s must be > 0 (got {self.s})")
        if not self.eta >= 0:
            errors.append(f"Ohmic coupling eta must be >= 0 (got {self.eta})")
        if not self.omega_c > 0:
            errors.append(f"Ohmic cutoff omega_c must be > 0 (got {self.omega_c})")
        return errors


@dataclass(frozen=True)
class Lorentzian:
    """Lorentzian peak of width Gamma centred at Omega."""

    Omega: float = 1.0
    Gamma: float = 0.01
    strength: float = 1e-5
    normalization: LorentzianNormalization = LorentzianNormalization.AREA

    family = SpectralFamily.LORENTZIAN

    def __post_init__(self) -> None:
        if isinstance(self.normalization, str):
            object.__setattr__(
                self, "normalization", LorentzianNormalization(self.normalization.lower())
            )

    def validate(self) -> List[str]:
        """Return a list of invariant violations."""
        errors = []
        if not self.Gamma > 0:
            errors.append(f"Lorentzian width Gamma must be > 0 (got {self.Gamma})")
        if not self.Omega > 0:
            errors.append(f"Lorentzian centre Omega must be > 0 (got {self.Omega})")
        if not self.strength >= 0:
            errors.append(f"Lorentzian strength must be >= 0 (got {self.strength})")
        return errors


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear J(w) through (omega, J) points, zero outside the table."""

    points: Tuple[Tuple[float, float], ...] = ()

    family = SpectralFamily.TABULATED

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "points", tuple((float(w), float(j)) for w, j in self.points)
        )

    @property
    def omegas(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)

    def validate(self) -> List[str]:
        """Return a list of invariant violations."""
        errors = []
        if len(self.points) < 2:
            errors.append("Tabulated density needs at least two points")
            return errors
        if np.any(np.diff(self.omegas) <= 0):
            errors.append("Tabulated frequencies must be strictly increasing")
        if self.omegas[0] < 0:
            errors.append("Tabulated frequencies must be >= 0")
        if np.any(self.values < 0):
            errors.append("Tabulated J values must be >= 0")
        return errors


SpectralDensity = Union[OhmicFamily, Lorentzian, Tabulated]


@dataclass(frozen=True)
class GridConfig:
    """Discretization grid for a spectral density."""

    n_modes: int = 256
    omega_min: float = 0.0
    omega_max: Optional[float] = None  # None means 10 x characteristic frequency
    scheme: GridScheme = GridScheme.LINEAR_MIDPOINT

    def __post_init__(self) -> None:
        """Convert scheme string to enum."""
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", GridScheme(self.scheme.lower()))

    def validate(self) -> List[str]:
        """Return a list of invariant violations."""
        errors = []
        if int(self.n_modes) != self.n_modes or self.n_modes <= 0:
            errors.append(f"grid.n_modes must be a positive integer (got {self.n_modes})")
        if self.omega_min < 0:
            errors.append(f"grid.omega_min must be >= 0 (got {self.omega_min})")
        if self.omega_max is not None and not self.omega_max > self.omega_min:
            errors.append(
                f"grid.omega_max must exceed omega_min ({self.omega_max} <= {self.omega_min})"
            )
        return errors


@dataclass(frozen=True, eq=False)
class DiscretizedBath:
    """Finite set of bath modes with one coupling row per system oscillator."""

    omegas: np.ndarray
    couplings: np.ndarray
    weights: Optional[np.ndarray] = None
    scheme: Optional[GridScheme] = None
    spacing: Optional[float] = None  # uniform cell width, LinearMidpoint only
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        omegas = np.array(self.omegas, dtype=float).reshape(-1)
        couplings = np.array(self.couplings, dtype=float)
        if couplings.ndim == 1:
            couplings = couplings.reshape(1, -1)

        if couplings.shape[1] != omegas.size:
            raise DomainError(
                f"couplings have {couplings.shape[1]} columns for {omegas.size} bath modes"
            )
        if omegas.size and np.any(omegas <= 0):
            raise DomainError("bath frequencies must be > 0")
        if np.any(np.diff(omegas) <= 0):
            raise DomainError("bath frequencies must be strictly increasing")
        if not np.all(np.isfinite(couplings)):
            raise DomainError("bath couplings must be finite")

        omegas.setflags(write=False)
        couplings.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "couplings", couplings)
        if self.weights is not None:
            weights = np.array(self.weights, dtype=float)
            weights.setflags(write=False)
            object.__setattr__(self, "weights", weights)

    @property
    def n_modes(self) -> int:
        return int(self.omegas.size)

    @property
    def n_systems(self) -> int:
        return int(self.couplings.shape[0])

    def cache_key(self) -> Tuple[bytes, bytes, Tuple[int, int]]:
        """Hashable identity of the numerical content."""
        return (self.omegas.tobytes(), self.couplings.tobytes(), self.couplings.shape)

    def subset(self, indices: np.ndarray) -> "DiscretizedBath":
        """Bath restricted to the given (sorted) mode indices."""
        idx = np.sort(np.asarray(indices, dtype=int))
        return DiscretizedBath(
            omegas=self.omegas[idx],
            couplings=self.couplings[:, idx],
            weights=None if self.weights is None else self.weights[idx],
            scheme=self.scheme,
        )

    def scaled(self, factor: float) -> "DiscretizedBath":
        """Bath with every coupling multiplied by factor."""
        return DiscretizedBath(
            omegas=self.omegas,
            couplings=self.couplings * factor,
            weights=self.weights,
            scheme=self.scheme,
            spacing=self.spacing,
            metadata=dict(self.metadata),
        )
