"""Long-time propagation by composing step matrices, plus trace diagnostics."""

from .compose import compose, resolve_config
from .diagnostics import (
    anti_coefficient,
    bogoliubov_defect,
    default_time_step,
    expectation_x,
    expectation_x_trace,
    green_u,
    log_growth_rate,
    oscillation_amplitude,
    oscillation_onset,
    recurrence_time,
    system_rows_defect,
)
from .models import GreenTrace, PropagationConfig

__all__ = [
    "PropagationConfig",
    "GreenTrace",
    "compose",
    "resolve_config",
    "green_u",
    "anti_coefficient",
    "bogoliubov_defect",
    "system_rows_defect",
    "expectation_x",
    "expectation_x_trace",
    "oscillation_onset",
    "oscillation_amplitude",
    "log_growth_rate",
    "default_time_step",
    "recurrence_time",
]
