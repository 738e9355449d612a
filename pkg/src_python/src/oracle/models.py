"""Data models for the exact normal-mode oracle."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class StabilityClass(Enum):
    """Sign of the lowest eigenvalue of the potential matrix."""

    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True, eq=False)
class PotentialMatrix:
    """
    Symmetric V of H = 1/2 p^T p + 1/2 x^T V x.

    Diagonal Omega_i^2 and w_k^2, system-bath entries 2 g_ik sqrt(Omega_i w_k),
    all other off-diagonals zero.
    """

    entries: np.ndarray
    n_systems: int = 1

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    @property
    def max_diagonal(self) -> float:
        return float(np.max(np.diag(self.entries)))

    @property
    def norm(self) -> float:
        """Max-abs norm."""
        return float(np.max(np.abs(self.entries)))

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))


@dataclass(frozen=True, eq=False)
class NormalModes:
    """Eigendecomposition V = Q diag(lambda) Q^T."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float = 0.0


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Eigenvalue spectrum of V and its classification."""

    eigenvalues: np.ndarray
    classification: StabilityClass
    discrete_criterion: float
    tolerance: float
    eta_critical_estimate: Optional[float] = None
    criteria: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def lines(self) -> list:
        """Human-readable report lines."""
        out = [
            f"classification        = {self.classification.value}",
            f"min eigenvalue of V   = {self.min_eigenvalue:.6e}",
            f"max eigenvalue of V   = {float(self.eigenvalues[-1]):.6e}",
            f"classification tol    = {self.tolerance:.3e}",
            f"discrete criterion    = {self.discrete_criterion:.10f}",
        ]
        if self.criteria.size > 1:
            joined = ", ".join(f"{value:.6f}" for value in self.criteria)
            out.append(f"criterion per system  = [{joined}]")
        if self.eta_critical_estimate is not None:
            out.append(f"eta_M (closed form)   = {self.eta_critical_estimate:.10f}")
        return out


@dataclass(frozen=True)
class CriticalCouplingEstimate:
    """Coupling at which min eig(V) crosses zero, next to the discrete-criterion value."""

    eta_eigenvalue: float
    eta_criterion: float
    min_eigenvalue_at_root: float

    @property
    def discrepancy(self) -> float:
        return abs(self.eta_eigenvalue - self.eta_criterion)
