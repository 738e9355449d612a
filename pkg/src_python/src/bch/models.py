"""Data models for operator bases, Bogoliubov matrices and Taylor coefficients."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..utils.errors import DomainError


class CouplingMode(Enum):
    """Form of the system-bath coupling kept in the step matrix."""

    FULL_COUPLING = "full_coupling"
    RWA = "rwa"


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Frequencies of the system oscillators (hbar = m = 1)."""

    omegas: np.ndarray

    def __post_init__(self) -> None:
        omegas = np.array(self.omegas, dtype=float).reshape(-1)
        if omegas.size == 0:
            raise DomainError("SystemSpec needs at least one oscillator")
        if not np.all(np.isfinite(omegas)) or np.any(omegas <= 0):
            raise DomainError(f"system frequencies must be finite and > 0 (got {omegas})")
        omegas.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)

    @classmethod
    def single(cls, omega0: float) -> "SystemSpec":
        return cls(omegas=np.array([omega0]))

    @property
    def n_systems(self) -> int:
        return int(self.omegas.size)

    @property
    def omega0(self) -> float:
        """Frequency of the first oscillator."""
        return float(self.omegas[0])

    def cache_key(self) -> bytes:
        return self.omegas.tobytes()


@dataclass(frozen=True)
class OperatorBasis:
    """
    Ordering (a_1..a_S, b_1..b_K, a_1^+..a_S^+, b_1^+..b_K^+) with signature metric.

    The same index order (systems first, then bath) is used for the real
    X/P basis of the Taylor recurrence.
    """

    n_systems: int
    n_modes: int

    @property
    def n(self) -> int:
        """Number of oscillators, S + K."""
        return self.n_systems + self.n_modes

    @property
    def dimension(self) -> int:
        return 2 * self.n

    @property
    def metric(self) -> np.ndarray:
        return np.concatenate([np.ones(self.n), -np.ones(self.n)])

    def a(self, i: int = 0) -> int:
        return i

    def b(self, k: int) -> int:
        return self.n_systems + k

    def a_dag(self, i: int = 0) -> int:
        return self.n + i

    def b_dag(self, k: int) -> int:
        return self.n + self.n_systems + k

    def labels(self) -> List[str]:
        names = [f"a{i}" for i in range(self.n_systems)] + [f"b{k}" for k in range(self.n_modes)]
        return names + [f"{name}+" for name in names]


@dataclass(frozen=True, eq=False)
class BogoliubovMatrix:
    """v(t) = M v(0) in the OperatorBasis ordering."""

    entries: np.ndarray
    time: float
    n_systems: int = 1

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] % 2:
            raise DomainError(
                f"Bogoliubov matrix must be square of even size (got {entries.shape})"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, basis: OperatorBasis) -> "BogoliubovMatrix":
        return cls(np.eye(basis.dimension, dtype=complex), 0.0, basis.n_systems)

    @classmethod
    def from_annihilation_rows(
        cls, rows: np.ndarray, time: float, n_systems: int
    ) -> "BogoliubovMatrix":
        """Complete a matrix from its first n rows using conjugation symmetry."""
        n = rows.shape[0]
        upper, lower_left = rows[:, :n], rows[:, n:]
        entries = np.block([[upper, lower_left], [lower_left.conj(), upper.conj()]])
        return cls(entries, time, n_systems)

    @property
    def basis(self) -> OperatorBasis:
        return OperatorBasis(self.n_systems, self.dimension // 2 - self.n_systems)

    @property
    def dimension(self) -> int:
        return int(self.entries.shape[0])

    def annihilation_rows(self) -> np.ndarray:
        return self.entries[: self.dimension // 2]

    def conjugation_defect(self) -> float:
        """Max deviation from M = [[U, W], [conj W, conj U]]."""
        n = self.dimension // 2
        m = self.entries
        return float(
            max(
                np.max(np.abs(m[n:, n:] - m[:n, :n].conj())),
                np.max(np.abs(m[n:, :n] - m[:n, n:].conj())),
            )
        )

    def compose(self, later: "BogoliubovMatrix") -> "BogoliubovMatrix":
        """Matrix for evolving by self, then by later."""
        entries = later.entries @ self.entries
        return BogoliubovMatrix(entries, self.time + later.time, self.n_systems)


@dataclass(frozen=True, eq=False)
class TaylorCoefficients:
    """
    Nested-commutator vectors T_0..T_N over (X_1..X_n, P_1..P_n).

    by_g_order[n, m] holds the part of T_n that is of order m in the couplings,
    for m = 0..max_g_order.
    """

    vectors: np.ndarray
    by_g_order: np.ndarray
    frequencies: np.ndarray
    n_systems: int
    mode: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("vectors", "by_g_order", "frequencies"):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def order(self) -> int:
        return int(self.vectors.shape[0] - 1)

    @property
    def max_g_order(self) -> int:
        return int(self.by_g_order.shape[1] - 1)

    @property
    def n(self) -> int:
        return int(self.frequencies.size)

    def x_part(self, index: int) -> np.ndarray:
        return self.vectors[index, : self.n]

    def p_part(self, index: int) -> np.ndarray:
        return self.vectors[index, self.n :]

    def select(self, g_orders: Optional[Tuple[int, ...]]) -> np.ndarray:
        """Vectors restricted to the given coupling orders (all orders when None)."""
        if g_orders is None:
            return self.vectors
        orders = tuple(g_orders)
        if orders and max(orders) > self.max_g_order:
            raise DomainError(
                f"g-order {max(orders)} requested but only {self.max_g_order} were tracked"
            )
        return self.by_g_order[:, list(orders), :].sum(axis=1)
