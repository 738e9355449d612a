"""Unit tests for step composition and trace diagnostics."""

import math

import numpy as np
import pytest

from src.bch.models import BogoliubovMatrix, CouplingMode, OperatorBasis
from src.cli.validation import ORACLE_TOLERANCE, ORDER_THRESHOLD, check_dt_convergence, oracle_error
from src.oracle import StabilityClass, build_potential_matrix, classify_stability
from src.propagator import (
    GreenTrace,
    PropagationConfig,
    compose,
    default_time_step,
    expectation_x,
    expectation_x_trace,
    log_growth_rate,
    oscillation_amplitude,
    oscillation_onset,
    recurrence_time,
    resolve_config,
)
from src.spectral import GridConfig, GridScheme, OhmicFamily, discretize
from src.spectral.models import DiscretizedBath
from src.utils.errors import ConfigurationError, InsufficientDataError


def synthetic_trace(times, abs_u):
    """Trace with real u values and no anti-coefficient."""
    times = np.asarray(times, dtype=float)
    return GreenTrace(
        times=times,
        u_values=np.asarray(abs_u, dtype=complex),
        anti_values=np.zeros(times.size, dtype=complex),
        defects=np.zeros(times.size),
    )


class TestCompose:
    """Tests for compose."""

    def test_free_oscillator(self, system, free_bath, short_propagation):
        trace = compose(system, free_bath, short_propagation)
        assert len(trace) == 1001
        assert np.allclose(trace.abs_u, 1.0, atol=1e-12)
        assert np.allclose(trace.u_values, np.exp(-1j * trace.times), atol=1e-10)
        assert not trace.unstable

    def test_rwa_never_amplifies(self, system, small_bath):
        cfg = PropagationConfig(t_max=10.0, dt=0.01, mode=CouplingMode.RWA)
        trace = compose(system, small_bath, cfg)
        assert trace.mode is CouplingMode.RWA
        assert trace.sup_abs_u() <= 1.0 + 1e-6
        assert np.allclose(trace.anti_values, 0.0)

    def test_resonant_rwa_mode_exchanges_fully(self, system):
        g = 0.1
        bath = DiscretizedBath(omegas=np.array([1.0]), couplings=np.array([[g]]))
        t_max = math.pi / (2 * g)
        cfg = PropagationConfig(t_max=t_max, dt=t_max / 4000, mode=CouplingMode.RWA)
        trace = compose(system, bath, cfg)
        expected = np.exp(-1j * trace.times) * np.cos(g * trace.times)
        assert np.max(np.abs(trace.u_values - expected)) <= 1e-6
        assert abs(trace.u_values[-1]) <= 1e-6
        assert np.all(trace.anti_values == 0)

    def test_rows_only_matches_full_matrix(self, system, small_bath):
        rows = compose(system, small_bath, PropagationConfig(t_max=5.0, dt=0.01))
        full = compose(system, small_bath, PropagationConfig(t_max=5.0, dt=0.01, full_matrix=True))
        assert np.allclose(rows.u_values, full.u_values, atol=1e-12, rtol=0)
        assert np.allclose(rows.anti_values, full.anti_values, atol=1e-12, rtol=0)
        assert full.final_defect <= 1e-5

    def test_return_matrix(self, system, five_mode_bath):
        trace = compose(
            system, five_mode_bath, PropagationConfig(t_max=2.0, dt=0.01), return_matrix=True
        )
        assert trace.final_matrix is not None
        assert trace.final_matrix.time == pytest.approx(2.0)
        assert trace.final_matrix.entries[0, 0] == pytest.approx(trace.u_values[-1])

    def test_matches_oracle(self, system, small_bath, short_propagation):
        trace = compose(system, small_bath, short_propagation)
        assert oracle_error(system, small_bath, trace) <= ORACLE_TOLERANCE
        assert trace.final_defect <= 1e-5

    def test_record_stride(self, system, small_bath):
        cfg = PropagationConfig(t_max=10.0, dt=0.01, record_stride=10)
        trace = compose(system, small_bath, cfg)
        assert len(trace) == 101
        assert trace.times[1] == pytest.approx(0.1)
        assert trace.times[-1] == pytest.approx(10.0)

    def test_two_systems(self, two_system_bath):
        system, bath = two_system_bath
        trace = compose(system, bath, PropagationConfig(t_max=3.0, dt=0.01))
        assert oracle_error(system, bath, trace) <= ORACLE_TOLERANCE

    def test_overflow_aborts(self, system, small_grid):
        bath = discretize(OhmicFamily(s=0.5, eta=2.0), small_grid)
        trace = compose(system, bath, PropagationConfig(t_max=50.0, dt=0.01))
        assert trace.unstable
        assert trace.aborted_at is not None and trace.aborted_at < 50.0
        assert trace.times[-1] <= trace.aborted_at
        assert np.all(np.isfinite(trace.u_values))

    def test_sub_ohmic_past_critical_grows(self, system):
        spec = OhmicFamily(s=0.5, eta=0.4)
        bath = discretize(spec, GridConfig(n_modes=64))
        trace = compose(system, bath, PropagationConfig(t_max=50.0, dt=0.02))
        assert trace.sup_abs_u() > 10.0
        report = classify_stability(build_potential_matrix(system, bath), system, bath, spec)
        assert report.classification is StabilityClass.UNSTABLE

    def test_misaligned_grid_rejected(self, system, small_bath):
        with pytest.raises(ConfigurationError, match="grid misaligned"):
            compose(system, small_bath, PropagationConfig(t_max=1.0, dt=0.3))

    def test_invalid_stride_rejected(self, system, small_bath):
        with pytest.raises(ConfigurationError, match="record_stride"):
            compose(system, small_bath, PropagationConfig(t_max=1.0, dt=0.1, record_stride=0))

    def test_echo_warning_past_recurrence_time(self, system, small_bath):
        trace = compose(system, small_bath, PropagationConfig(t_max=25.0, dt=0.05))
        assert trace.metadata["t_rec"] == pytest.approx(2 * math.pi * 3.2)
        assert trace.metadata["echo_warning"] is True


class TestTimeStep:
    """Tests for default_time_step and resolve_config."""

    def test_free_bath_uses_phase_limit(self, system, free_bath):
        assert default_time_step(system, free_bath, 1.0) == pytest.approx(0.04)

    def test_grid_aligned(self, system, five_mode_bath):
        dt = default_time_step(system, five_mode_bath, 10.0)
        assert dt <= 0.1 / 2.9
        assert 10.0 / dt == pytest.approx(round(10.0 / dt), abs=1e-9)

    def test_coupling_limit(self, system):
        bath = DiscretizedBath(omegas=np.array([1.0]), couplings=np.array([[5.0]]))
        dt = default_time_step(system, bath, 1.0)
        assert dt <= 0.01
        assert 5.0 * dt <= 0.1

    def test_resolve_fills_dt(self, system, small_bath):
        cfg = resolve_config(system, small_bath, PropagationConfig(t_max=5.0))
        assert cfg.dt is not None
        assert cfg.n_steps * cfg.dt == pytest.approx(5.0)

    def test_recurrence_time(self, small_bath, ohmic_spec):
        assert recurrence_time(small_bath) == pytest.approx(2 * math.pi / (10.0 / 32))
        gauss = discretize(ohmic_spec, GridConfig(n_modes=16, scheme=GridScheme.GAUSS_LEGENDRE))
        assert recurrence_time(gauss) is None


class TestTraceDiagnostics:
    """Tests for onset, amplitude and growth rate."""

    def test_onset_and_amplitude(self):
        times = np.linspace(0.0, 10.0, 1001)
        trace = synthetic_trace(times, 0.5 + 0.3 * np.cos(2 * times))
        assert oscillation_onset(trace) == pytest.approx(math.pi / 2, abs=0.01)
        assert oscillation_amplitude(trace) == pytest.approx(0.6, abs=1e-3)

    def test_monotone_decay_has_no_onset(self):
        times = np.linspace(0.0, 10.0, 501)
        trace = synthetic_trace(times, np.exp(-0.2 * times))
        assert oscillation_onset(trace) is None
        assert oscillation_amplitude(trace) == 0.0

    def test_small_ripple_below_threshold(self):
        times = np.linspace(0.0, 10.0, 1001)
        trace = synthetic_trace(times, 0.5 + 0.002 * np.cos(2 * times))
        assert oscillation_onset(trace) is None

    def test_amplitude_after_explicit_time(self):
        times = np.linspace(0.0, 10.0, 1001)
        trace = synthetic_trace(times, 0.5 + 0.3 * np.cos(2 * times))
        assert oscillation_amplitude(trace, after=9.5) == 0.0

    def test_growth_rate(self):
        times = np.linspace(0.0, 20.0, 401)
        trace = synthetic_trace(times, np.exp(0.3 * times))
        assert log_growth_rate(trace) == pytest.approx(0.3, rel=1e-9)

    def test_short_traces_rejected(self):
        with pytest.raises(InsufficientDataError):
            oscillation_onset(synthetic_trace([0.0, 1.0], [1.0, 0.5]))
        with pytest.raises(InsufficientDataError):
            log_growth_rate(synthetic_trace(np.arange(8.0), np.ones(8)))

    def test_value_at_nearest_sample(self):
        trace = synthetic_trace([0.0, 0.5, 1.0], [1.0, 0.8, 0.6])
        assert trace.value_at(0.6) == 0.8


class TestExpectationX:
    """Tests for <x(t)> of a coherent system state."""

    def test_identity_matrix(self):
        matrix = BogoliubovMatrix.identity(OperatorBasis(1, 2))
        assert expectation_x(matrix, 0.5 + 0.2j, 2.0) == pytest.approx(0.5)

    def test_free_oscillator_trace(self, system, free_bath, short_propagation):
        trace = compose(system, free_bath, short_propagation)
        x = expectation_x_trace(trace, 1.0, 1.0)
        assert np.allclose(x, math.sqrt(2.0) * np.cos(trace.times), atol=1e-10)


@pytest.mark.slow
class TestOracleAgreement:
    """Stepped propagation against the exact oracle on a 256-mode Ohmic bath."""

    def test_error_and_order(self, system):
        bath = discretize(OhmicFamily(s=1.0, eta=0.1), GridConfig(n_modes=256))
        cfg = resolve_config(system, bath, PropagationConfig(t_max=50.0, dt=0.01))
        check, errors = check_dt_convergence(system, bath, cfg)
        assert errors[-1] <= ORACLE_TOLERANCE
        assert check.measured >= ORDER_THRESHOLD
        assert errors[0] > errors[1] > errors[2]

    def test_defect_stays_small(self, system):
        bath = discretize(OhmicFamily(s=1.0, eta=0.1), GridConfig(n_modes=256))
        trace = compose(system, bath, PropagationConfig(t_max=50.0))
        assert np.max(trace.defects) <= 1e-5

    def test_defect_shrinks_quadratically(self, system):
        bath = discretize(OhmicFamily(s=1.0, eta=0.1), GridConfig(n_modes=256))
        coarse = compose(system, bath, PropagationConfig(t_max=50.0, dt=0.02))
        fine = compose(system, bath, PropagationConfig(t_max=50.0, dt=0.01))
        assert fine.final_defect <= 1e-5
        assert coarse.final_defect / fine.final_defect >= 3.0
