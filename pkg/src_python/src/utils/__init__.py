"""Utility functions and helpers."""

from .errors import (
    ConfigurationError,
    DegenerateSpectrumError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    OpenQoscError,
    TruncationError,
)
from .logger import set_log_level, setup_logger

__all__ = [
    "setup_logger",
    "set_log_level",
    "OpenQoscError",
    "ConfigurationError",
    "DomainError",
    "TruncationError",
    "DegenerateSpectrumError",
    "InsufficientDataError",
    "NumericalError",
]
