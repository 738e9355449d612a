"""Pytest configuration and shared fixtures for all tests."""

import numpy as np
import pytest

from src.bch.models import SystemSpec
from src.config.config import RunConfig
from src.propagator.models import PropagationConfig
from src.spectral.density import discretize
from src.spectral.models import DiscretizedBath, GridConfig, Lorentzian, OhmicFamily


# ===========================
# Spectral Fixtures
# ===========================


@pytest.fixture
def ohmic_spec():
    """Ohmic density, eta = 0.1, w_c = 1."""
    return OhmicFamily(s=1.0, eta=0.1, omega_c=1.0)


@pytest.fixture
def sub_ohmic_spec():
    """Sub-Ohmic density, s = 0.5, eta = 0.1."""
    return OhmicFamily(s=0.5, eta=0.1, omega_c=1.0)


@pytest.fixture
def lorentzian_spec():
    """Narrow Lorentzian centred on the system frequency."""
    return Lorentzian(Omega=1.0, Gamma=0.01, strength=1e-5)


@pytest.fixture
def small_grid():
    """Coarse grid for fast tests."""
    return GridConfig(n_modes=32, omega_max=10.0)


# ===========================
# Bath Fixtures
# ===========================


@pytest.fixture
def system():
    """Single oscillator at w0 = 1."""
    return SystemSpec.single(1.0)


@pytest.fixture
def small_bath(ohmic_spec, small_grid):
    """32-mode Ohmic bath."""
    return discretize(ohmic_spec, small_grid)


@pytest.fixture
def five_mode_bath():
    """Hand-made bath with no mode near w0 = 1."""
    return DiscretizedBath(
        omegas=np.array([0.3, 0.7, 1.6, 2.2, 2.9]),
        couplings=np.array([[0.05, 0.08, 0.06, 0.04, 0.02]]),
    )


@pytest.fixture
def free_bath():
    """Bath with every coupling set to zero."""
    return DiscretizedBath(
        omegas=np.array([0.5, 1.5, 2.5]),
        couplings=np.zeros((1, 3)),
    )


@pytest.fixture
def two_system_bath():
    """Two system oscillators sharing four bath modes."""
    return (
        SystemSpec(omegas=np.array([1.0, 1.3])),
        DiscretizedBath(
            omegas=np.array([0.4, 0.9, 1.7, 2.6]),
            couplings=np.array([[0.05, 0.07, 0.03, 0.02], [0.02, 0.04, 0.06, 0.05]]),
        ),
    )


# ===========================
# Configuration Fixtures
# ===========================


@pytest.fixture
def short_propagation():
    """Ten time units at dt = 0.01."""
    return PropagationConfig(t_max=10.0, dt=0.01)


@pytest.fixture
def sample_run_config(tmp_path):
    """Small Ohmic run writing into a temporary directory."""
    return RunConfig.from_dict(
        {
            "spectral": {"family": "ohmic", "s": 1.0, "eta": 0.1, "omega_c": 1.0},
            "grid": {"n_modes": 32, "omega_max": 10.0},
            "propagation": {"t_max": 5.0, "dt": 0.01},
            "output": {"path": str(tmp_path / "out"), "prefix": "trace"},
        }
    )


@pytest.fixture
def temp_config_file(tmp_path):
    """Flat key = value configuration file."""
    config_file = tmp_path / "run.conf"
    config_file.write_text(
        "# small Ohmic run\n"
        "spectral.family = ohmic\n"
        "spectral.eta = 0.1\n"
        "grid.n_modes = 32\n"
        "grid.omega_max = 10.0\n"
        "propagation.t_max = 5.0\n"
        "propagation.dt = 0.01  # grid aligned\n"
    )
    return str(config_file)


# ===========================
# Environment Setup
# ===========================


@pytest.fixture(autouse=True)
def clean_env_vars(monkeypatch):
    """Clean environment variables before each test."""
    for var in ("OPENQOSC_THREADS", "OPENQOSC_LOG_LEVEL"):
        monkeypatch.delenv(var, raising=False)


# ===========================
# Test Markers
# ===========================


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "integration: mark test as a CLI end-to-end run")
    config.addinivalue_line("markers", "slow: mark test as slow running")
