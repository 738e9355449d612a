"""Configuration module for simulation runs and sweeps."""

from .config import (
    SWEEP_AXES,
    OutputSection,
    RunConfig,
    SpectralSection,
    SweepConfig,
    SweepSection,
    SystemSection,
    apply_axis,
    environment_overrides,
    format_value,
    list_presets,
    load_config,
    load_preset,
    parse_flat_text,
    parse_overrides,
    parse_value,
    read_config_file,
    write_flat_text,
)

__all__ = [
    "SWEEP_AXES",
    "SystemSection",
    "SpectralSection",
    "OutputSection",
    "SweepSection",
    "RunConfig",
    "SweepConfig",
    "apply_axis",
    "load_config",
    "load_preset",
    "list_presets",
    "read_config_file",
    "parse_flat_text",
    "parse_value",
    "parse_overrides",
    "format_value",
    "write_flat_text",
    "environment_overrides",
]
