"""Configuration management for simulation runs and parameter sweeps."""

import copy
import dataclasses
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import yaml

from ..bch.models import CouplingMode, SystemSpec
from ..propagator.models import PropagationConfig
from ..spectral.models import (
    GridConfig,
    GridScheme,
    Lorentzian,
    LorentzianNormalization,
    OhmicFamily,
    SpectralDensity,
    SpectralFamily,
    Tabulated,
)
from ..utils.errors import ConfigurationError, DomainError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"
RESULT_NAMESPACE = "result."
SWEEP_AXES = ("eta", "s", "omega_c", "omega0", "dt", "n_modes")


@dataclass
class SystemSection:
    """System oscillators and the coherent initial state used for <x(t)>."""

    omega0: float = 1.0
    omegas: Optional[List[float]] = None  # several oscillators; overrides omega0
    alpha_re: float = 1.0
    alpha_im: float = 0.0

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    def to_spec(self) -> SystemSpec:
        return SystemSpec(omegas=self.omegas if self.omegas else [self.omega0])

    def validate(self) -> List[str]:
        errors = []
        frequencies = self.omegas if self.omegas else [self.omega0]
        if any(not float(w) > 0 for w in frequencies):
            errors.append(f"system frequencies must be > 0 (got {frequencies})")
        return errors


@dataclass
class SpectralSection:
    """Spectral density family and its parameters."""

    family: SpectralFamily = SpectralFamily.OHMIC
    s: float = 1.0
    eta: float = 0.1
    omega_c: float = 1.0
    Omega: float = 1.0
    Gamma: float = 0.01
    strength: float = 1e-5
    normalization: LorentzianNormalization = LorentzianNormalization.AREA
    points: Optional[List[List[float]]] = None

    def __post_init__(self) -> None:
        """Convert family and normalization strings to enums."""
        if isinstance(self.family, str):
            self.family = SpectralFamily(self.family.lower())
        if isinstance(self.normalization, str):
            self.normalization = LorentzianNormalization(self.normalization.lower())

    def to_spec(self) -> SpectralDensity:
        if self.family is SpectralFamily.OHMIC:
            return OhmicFamily(s=self.s, eta=self.eta, omega_c=self.omega_c)
        if self.family is SpectralFamily.LORENTZIAN:
            return Lorentzian(
                Omega=self.Omega,
                Gamma=self.Gamma,
                strength=self.strength,
                normalization=self.normalization,
            )
        return Tabulated(points=tuple(tuple(p) for p in (self.points or [])))

    def validate(self) -> List[str]:
        if self.family is SpectralFamily.TABULATED and not self.points:
            return ["spectral.points is required for the tabulated family"]
        return self.to_spec().validate()


@dataclass
class OutputSection:
    """Where result files go."""

    path: str = "openqosc-out"
    prefix: str = "trace"


@dataclass
class SweepSection:
    """Parameter axis of a sweep."""

    axis: Optional[str] = None
    values: List[float] = field(default_factory=list)
    parallelism: int = 1


@dataclass
class RunConfig:
    """Main configuration class."""

    system: SystemSection = field(default_factory=SystemSection)
    spectral: SpectralSection = field(default_factory=SpectralSection)
    grid: GridConfig = field(default_factory=GridConfig)
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    output: OutputSection = field(default_factory=OutputSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    log_level: str = "INFO"

    @classmethod
    def from_dict(cls, config_dict: Mapping[str, Any]) -> "RunConfig":
        """Create RunConfig instance from a nested dictionary."""
        try:
            return cls(
                system=SystemSection(**config_dict.get("system", {})),
                spectral=SpectralSection(**config_dict.get("spectral", {})),
                grid=GridConfig(**config_dict.get("grid", {})),
                propagation=PropagationConfig(**config_dict.get("propagation", {})),
                output=OutputSection(**config_dict.get("output", {})),
                sweep=SweepSection(**config_dict.get("sweep", {})),
                log_level=str(config_dict.get("log_level", "INFO")),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError([str(e)]) from e

    @classmethod
    def from_flat(cls, flat: Mapping[str, Any]) -> "RunConfig":
        return cls.from_dict(unflatten(flat))

    def to_flat(self) -> Dict[str, Any]:
        """Every configuration key in dotted form, enums as their values."""
        nested = {
            "system": dataclasses.asdict(self.system),
            "spectral": dataclasses.asdict(self.spectral),
            "grid": dataclasses.asdict(self.grid),
            "propagation": dataclasses.asdict(self.propagation),
            "output": dataclasses.asdict(self.output),
            "sweep": dataclasses.asdict(self.sweep),
            "log_level": self.log_level,
        }
        return {key: _plain(value) for key, value in flatten(nested).items()}

    def spectral_density(self) -> SpectralDensity:
        return self.spectral.to_spec()

    def system_spec(self) -> SystemSpec:
        return self.system.to_spec()

    def validate(self) -> List[str]:
        """Validate configuration and return list of errors."""
        errors = []
        errors.extend(self.system.validate())
        errors.extend(self.spectral.validate())
        errors.extend(self.grid.validate())
        errors.extend(self.propagation.validate())

        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"Unknown log_level: {self.log_level}")
        if not self.output.path:
            errors.append("output.path is required")
        if int(self.sweep.parallelism) != self.sweep.parallelism or self.sweep.parallelism < 1:
            errors.append(
                f"sweep.parallelism must be a positive integer (got {self.sweep.parallelism})"
            )

        return errors


@dataclass
class SweepConfig:
    """A base run repeated along one parameter axis."""

    base: RunConfig
    axis: str
    values: List[Any]
    parallelism: int = 1

    @classmethod
    def from_run(cls, run: RunConfig) -> "SweepConfig":
        return cls(
            base=run,
            axis=run.sweep.axis or "",
            values=list(run.sweep.values),
            parallelism=int(run.sweep.parallelism),
        )

    def validate(self) -> List[str]:
        errors = self.base.validate()
        if self.axis not in SWEEP_AXES:
            errors.append(f"sweep.axis must be one of {', '.join(SWEEP_AXES)} (got {self.axis!r})")
        elif self.axis in ("eta", "s", "omega_c") and (
            self.base.spectral.family is not SpectralFamily.OHMIC
        ):
            errors.append(f"sweep axis {self.axis} needs the ohmic family")
        elif self.axis == "omega0" and self.base.system.omegas:
            errors.append("sweep axis omega0 does not apply to several system oscillators")
        if not self.values:
            errors.append("sweep.values must not be empty")
        if self.parallelism < 1:
            errors.append(f"sweep parallelism must be >= 1 (got {self.parallelism})")
        if self.axis == "n_modes" and any(int(v) != v for v in self.values):
            errors.append("sweep over n_modes needs integer values")
        return errors

    def point_config(self, value: Any) -> RunConfig:
        """Base configuration with the sweep axis set to value."""
        return apply_axis(self.base, self.axis, value)


def apply_axis(run: RunConfig, axis: str, value: Any) -> RunConfig:
    """Copy of run with one sweep axis replaced."""
    point = copy.deepcopy(run)
    if axis in ("eta", "s", "omega_c"):
        setattr(point.spectral, axis, float(value))
    elif axis == "omega0":
        point.system.omega0 = float(value)
    elif axis == "dt":
        point.propagation.dt = float(value)
    elif axis == "n_modes":
        point.grid = dataclasses.replace(point.grid, n_modes=int(value))
    else:
        raise ConfigurationError([f"Unknown sweep axis: {axis}"])
    return point


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def flatten(nested: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Nested mapping to dotted keys."""
    flat: Dict[str, Any] = {}
    for key, value in nested.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def unflatten(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """Dotted keys to a nested mapping."""
    nested: Dict[str, Any] = {}
    for dotted, value in flat.items():
        parts = dotted.split(".")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return nested


def parse_value(text: str) -> Any:
    """Parse a value as a YAML scalar or flow collection; bare exponents become floats."""
    text = text.strip()
    if text.lower() in ("", "none", "null", "~"):
        return None
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigurationError([f"Cannot parse value {text!r}: {e}"]) from e
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def format_value(value: Any) -> str:
    """Inverse of parse_value for the key = value format."""
    value = _plain(value)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return yaml.safe_dump(value, default_flow_style=True, width=10**9).strip()
    return str(value)


def parse_flat_text(text: str, source: str = "<text>") -> Dict[str, Any]:
    """
    Parse `key = value` lines with `#` comments.

    Raises:
        ConfigurationError: On a line without '='
    """
    flat: Dict[str, Any] = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            errors.append(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        flat[key.strip()] = parse_value(value)
    if errors:
        raise ConfigurationError(errors)
    return flat


def write_flat_text(flat: Mapping[str, Any], header: Iterable[str] = ()) -> str:
    lines = [f"# {line}" for line in header]
    lines.extend(f"{key} = {format_value(value)}" for key, value in flat.items())
    return "\n".join(lines) + "\n"


def read_config_file(config_path: str) -> Dict[str, Any]:
    """
    Read a configuration file into dotted keys.

    `.yaml`/`.yml` files hold nested mappings; anything else is `key = value` text.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigurationError: If the file cannot be parsed
    """
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, "r", encoding="utf-8") as f:
        text = f.read()

    if Path(config_path).suffix.lower() in (".yaml", ".yml"):
        try:
            config_dict = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError([f"{config_path}: invalid YAML: {e}"]) from e
        if not isinstance(config_dict, Mapping):
            raise ConfigurationError([f"{config_path}: top level must be a mapping"])
        return flatten(config_dict)

    return parse_flat_text(text, source=config_path)


def list_presets() -> List[str]:
    """Names of the shipped presets."""
    return sorted(p.stem for p in PRESET_DIR.glob("*.yaml"))


def load_preset(name: str) -> Dict[str, Any]:
    """
    Dotted keys of a shipped preset.

    Raises:
        ConfigurationError: If no preset has that name
    """
    path = PRESET_DIR / f"{name}.yaml"
    if not path.exists():
        raise ConfigurationError(
            [f"Unknown preset {name!r}; available: {', '.join(list_presets())}"]
        )
    return read_config_file(str(path))


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """`key=value` strings to dotted keys."""
    flat: Dict[str, Any] = {}
    errors = []
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            errors.append(f"override must look like key=value (got {pair!r})")
            continue
        flat[key.strip()] = parse_value(value)
    if errors:
        raise ConfigurationError(errors)
    return flat


def environment_overrides(env: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """
    Overrides from the environment.

    Environment variables:
        OPENQOSC_THREADS: Sweep parallelism
        OPENQOSC_LOG_LEVEL: Log level
    """
    env = os.environ if env is None else env
    flat: Dict[str, Any] = {}
    threads = env.get("OPENQOSC_THREADS")
    if threads:
        try:
            flat["sweep.parallelism"] = int(threads)
        except ValueError as e:
            message = f"OPENQOSC_THREADS must be an integer (got {threads!r})"
            raise ConfigurationError([message]) from e
    level = env.get("OPENQOSC_LOG_LEVEL")
    if level:
        flat["log_level"] = level.upper()
    return flat


def _check_keys(flat: Mapping[str, Any], source: str, known: Iterable[str]) -> List[str]:
    known_keys = set(known)
    return [
        f"{source}: unknown configuration key {key!r}"
        for key in flat
        if key not in known_keys and not key.startswith(RESULT_NAMESPACE)
    ]


def load_config(
    config_path: Optional[str] = None,
    preset: Optional[str] = None,
    overrides: Iterable[str] = (),
    env: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Assemble a RunConfig from all sources.

    Precedence, lowest first: built-in defaults, environment, preset,
    config file, `key=value` overrides.

    Args:
        config_path: Path to a `.yaml`/`.yml` or `key = value` file (optional)
        preset: Name of a shipped preset (optional)
        overrides: `key=value` strings
        env: Environment mapping (os.environ by default)

    Returns:
        RunConfig: Validated configuration instance

    Raises:
        FileNotFoundError: If config file doesn't exist
        ConfigurationError: If configuration is invalid
    """
    flat = RunConfig().to_flat()
    known = tuple(flat)
    layers: List[Tuple[str, Dict[str, Any]]] = [("environment", environment_overrides(env))]
    if preset:
        layers.append((f"preset {preset}", load_preset(preset)))
    if config_path:
        layers.append((config_path, read_config_file(config_path)))
    layers.append(("--set", parse_overrides(overrides)))

    errors: List[str] = []
    for source, layer in layers:
        errors.extend(_check_keys(layer, source, known))
        flat.update({k: v for k, v in layer.items() if not k.startswith(RESULT_NAMESPACE)})
    if errors:
        raise ConfigurationError(errors)

    try:
        config = RunConfig.from_flat(flat)
    except DomainError as e:
        raise ConfigurationError([str(e)]) from e

    # Validate configuration
    errors = config.validate()
    if errors:
        raise ConfigurationError(errors)

    sources = ", ".join(source for source, layer in layers if layer) or "defaults"
    logger.debug(f"Configuration loaded ({sources})")
    return config
