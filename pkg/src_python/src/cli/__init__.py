"""Command-line workflows: propagate, stability, sweep and validate."""

from .output import TRACE_COLUMNS, SUMMARY_COLUMNS, write_sidecar, write_trace_csv
from .runner import (
    ExitCode,
    run_propagate,
    run_stability,
    run_sweep,
    run_validate,
    stability_lines,
)
from .validation import CheckStatus, ValidationCheck, format_table, run_checks

__all__ = [
    "ExitCode",
    "run_propagate",
    "run_stability",
    "run_sweep",
    "run_validate",
    "stability_lines",
    "CheckStatus",
    "ValidationCheck",
    "run_checks",
    "format_table",
    "TRACE_COLUMNS",
    "SUMMARY_COLUMNS",
    "write_trace_csv",
    "write_sidecar",
]
