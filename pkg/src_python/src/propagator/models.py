"""Data models for composed propagation runs."""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..bch.models import BogoliubovMatrix, CouplingMode

GRID_ALIGNMENT = 1e-9


@dataclass
class PropagationConfig:
    """Time grid and coupling mode of a composed propagation."""

    t_max: float = 50.0
    dt: Optional[float] = None  # None means default_time_step
    mode: CouplingMode = CouplingMode.FULL_COUPLING
    record_stride: int = 1
    full_matrix: bool = False

    def __post_init__(self) -> None:
        """Convert mode string to enum."""
        if isinstance(self.mode, str):
            self.mode = CouplingMode(self.mode.lower())

    @property
    def n_steps(self) -> int:
        if self.dt is None:
            raise ValueError("n_steps needs a resolved dt")
        return int(round(self.t_max / self.dt))

    def validate(self) -> List[str]:
        """
        Validate the time grid.

        Returns:
            List of validation error messages (empty if valid)
        """
        errors = []
        if not self.t_max > 0:
            errors.append(f"propagation.t_max must be > 0 (got {self.t_max})")
        if self.dt is not None:
            if not self.dt > 0:
                errors.append(f"propagation.dt must be > 0 (got {self.dt})")
            elif self.dt > self.t_max:
                errors.append(f"propagation.dt {self.dt} exceeds t_max {self.t_max}")
            else:
                steps = self.t_max / self.dt
                if abs(steps - round(steps)) > GRID_ALIGNMENT * max(steps, 1.0):
                    errors.append(
                        f"propagation.t_max/dt = {steps} is not an integer (grid misaligned)"
                    )
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            errors.append(
                f"propagation.record_stride must be a positive integer (got {self.record_stride})"
            )
        return errors


@dataclass(frozen=True, eq=False)
class GreenTrace:
    """Time series of u(t) = M[a, a], the anti-coefficient M[a, a^+] and the defect."""

    times: np.ndarray
    u_values: np.ndarray
    anti_values: np.ndarray
    defects: np.ndarray
    dt: float = 0.0
    mode: CouplingMode = CouplingMode.FULL_COUPLING
    unstable: bool = False
    aborted_at: Optional[float] = None
    final_matrix: Optional[BogoliubovMatrix] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("times", "u_values", "anti_values", "defects"):
            array = np.array(getattr(self, name))
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def abs_u(self) -> np.ndarray:
        return np.abs(self.u_values)

    @property
    def final_defect(self) -> float:
        return float(self.defects[-1]) if self.defects.size else math.nan

    def sup_abs_u(self) -> float:
        return float(np.max(self.abs_u)) if self.times.size else math.nan

    def value_at(self, t: float) -> complex:
        """u at a recorded time (nearest sample)."""
        index = int(np.argmin(np.abs(self.times - t)))
        return complex(self.u_values[index])
