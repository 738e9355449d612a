"""Exception types raised by the simulator."""

from typing import List, Optional, Tuple


class OpenQoscError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(OpenQoscError, ValueError):
    """Invalid run, grid, propagation or sweep configuration."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__(
            "Configuration validation failed:\n" + "\n".join(f"  - {e}" for e in self.errors)
        )


class DomainError(OpenQoscError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class TruncationError(OpenQoscError, ArithmeticError):
    """A truncated series did not meet its convergence test."""

    def __init__(self, message: str, achieved_bound: float):
        self.achieved_bound = achieved_bound
        super().__init__(f"{message} (achieved bound {achieved_bound:.3e})")


class DegenerateSpectrumError(OpenQoscError, ValueError):
    """Two frequencies coincide where a closed form divides by their difference."""

    def __init__(self, message: str, pair: Optional[Tuple[float, float]] = None):
        self.pair = pair
        super().__init__(message)


class InsufficientDataError(OpenQoscError, ValueError):
    """Too few samples for a diagnostic."""


class NumericalError(OpenQoscError, ArithmeticError):
    """Linear algebra failure or residual above tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")
