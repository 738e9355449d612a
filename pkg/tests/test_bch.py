"""Unit tests for step matrices, the Taylor recurrence and chain sums."""

import math

import numpy as np
import pytest

from src.bch import (
    BogoliubovMatrix,
    CouplingMode,
    OperatorBasis,
    SystemSpec,
    chain_term,
    clear_step_cache,
    closed_form_taylor,
    eq2a_second_order,
    step_coefficients_full,
    step_coefficients_rwa,
    step_matrix,
    taylor_annihilation_row,
    taylor_coefficients,
    taylor_evaluate,
    to_ladder,
)
from src.bch.divided import exp_divided_1, exp_divided_2, oscillator_divided_differences
from src.oracle import exact_propagator
from src.propagator.diagnostics import bogoliubov_defect
from src.spectral.models import DiscretizedBath
from src.utils.errors import DegenerateSpectrumError, DomainError, TruncationError


def test_operator_basis_layout():
    basis = OperatorBasis(n_systems=2, n_modes=3)
    assert basis.n == 5
    assert basis.dimension == 10
    assert np.array_equal(basis.metric, [1] * 5 + [-1] * 5)
    assert basis.b(0) == 2
    assert basis.a_dag(1) == 6
    assert basis.b_dag(2) == 9


def test_system_spec_rejects_non_positive():
    with pytest.raises(DomainError):
        SystemSpec(omegas=np.array([1.0, 0.0]))


def test_from_annihilation_rows_is_conjugation_symmetric():
    rng = np.random.default_rng(3)
    rows = rng.normal(size=(3, 6)) + 1j * rng.normal(size=(3, 6))
    matrix = BogoliubovMatrix.from_annihilation_rows(rows, 0.5, 1)
    assert matrix.conjugation_defect() == 0.0
    assert np.array_equal(matrix.annihilation_rows(), rows)


class TestDividedDifferences:
    """Tests for exp(z t) and oscillator-kernel divided differences."""

    def test_first_difference_distinct(self):
        x, y, t = -0.7j, 0.4j, 0.3
        expected = (np.exp(x * t) - np.exp(y * t)) / (x - y)
        assert exp_divided_1(x, y, t, 1e-6) == pytest.approx(expected, abs=1e-15)

    def test_first_difference_confluent(self):
        x, t = -1.2j, 0.5
        assert exp_divided_1(x, x, t, 1e-6) == pytest.approx(t * np.exp(x * t), abs=1e-15)

    def test_first_difference_series_branch(self):
        x, t = -1.0j, 0.1
        y = x + 0.9e-6j
        z = (x - y) * t
        reference = t * np.exp(y * t) * np.expm1(z) / z
        assert exp_divided_1(x, y, t, 1e-6) == pytest.approx(reference, abs=1e-15)

    def test_second_difference_distinct(self):
        x, y, z, t = -1.0j, 0.3j, 1.7j, 0.2
        f = lambda u: np.exp(u * t)  # noqa: E731
        expected = (
            f(x) / ((x - y) * (x - z)) + f(y) / ((y - x) * (y - z)) + f(z) / ((z - x) * (z - y))
        )
        assert exp_divided_2(x, y, z, t, 1e-6) == pytest.approx(expected, abs=1e-13)

    def test_second_difference_clustered(self):
        c, t = -0.8j, 0.1
        value = exp_divided_2(c, c + 1e-8j, c - 1e-8j, t, 1e-6)
        assert value == pytest.approx(t * t / 2 * np.exp(c * t), abs=1e-14)

    def test_oscillator_single_node(self):
        cos_dd, sin_dd = oscillator_divided_differences((4.0,), 0.3)
        assert cos_dd == pytest.approx(math.cos(0.6))
        assert sin_dd == pytest.approx(math.sin(0.6) / 2.0)

    def test_oscillator_confluent_pair_is_derivative(self):
        t = 0.7
        cos_dd, _ = oscillator_divided_differences((1.0, 1.0), t)
        # d/dx cos(sqrt(x) t) at x = 1
        assert cos_dd == pytest.approx(-t * math.sin(t) / 2.0, rel=1e-10)

    def test_oscillator_confluent_matches_nearby_distinct(self):
        exact = oscillator_divided_differences((1.0, 1.0, 2.5), 1.0)
        nearby = oscillator_divided_differences((1.0, 1.0 + 1e-6, 2.5), 1.0)
        assert np.allclose(exact, nearby, atol=1e-5)


class TestStepMatrix:
    """Tests for the second-order step matrices."""

    def test_free_bath_is_pure_phase(self, system, free_bath):
        step = step_coefficients_full(system, free_bath, 0.1).entries
        w = np.concatenate([system.omegas, free_bath.omegas])
        expected = np.diag(np.concatenate([np.exp(-1j * w * 0.1), np.exp(1j * w * 0.1)]))
        assert np.allclose(step, expected, atol=1e-15)

    def test_rwa_has_no_anti_rotating_blocks(self, system, small_bath):
        step = step_coefficients_rwa(system, small_bath, 0.05).entries
        n = step.shape[0] // 2
        assert np.all(step[:n, n:] == 0)
        assert np.all(step[n:, :n] == 0)

    def test_rwa_annihilation_block_near_unitary(self, system):
        bath = DiscretizedBath(omegas=np.array([1.5]), couplings=np.array([[0.05]]))
        block = step_coefficients_rwa(system, bath, 0.2).entries[:2, :2]
        assert np.allclose(np.sum(np.abs(block) ** 2, axis=1), 1.0, atol=1e-6)

    def test_full_coupling_has_anti_rotating_blocks(self, system, small_bath):
        step = step_coefficients_full(system, small_bath, 0.05).entries
        n = step.shape[0] // 2
        assert np.max(np.abs(step[0, n:])) > 0

    def test_conjugation_symmetry(self, system, small_bath):
        step = step_coefficients_full(system, small_bath, 0.05)
        assert step.conjugation_defect() == 0.0

    def test_defect_is_third_order_in_dt(self, system, small_bath):
        coarse = bogoliubov_defect(step_coefficients_full(system, small_bath, 0.1))
        fine = bogoliubov_defect(step_coefficients_full(system, small_bath, 0.05))
        assert fine < coarse / 6

    def test_first_order_entries(self, system, five_mode_bath):
        dt = 0.1
        row = step_coefficients_full(system, five_mode_bath, dt).entries[0]
        w0, w, g = 1.0, five_mode_bath.omegas, five_mode_bath.couplings[0]
        expected_b = g * (np.exp(-1j * w0 * dt) - np.exp(-1j * w * dt)) / (w0 - w)
        expected_bdag = g * (np.exp(-1j * w0 * dt) - np.exp(1j * w * dt)) / (w0 + w)
        assert np.allclose(row[1:6], expected_b, atol=1e-15)
        assert np.allclose(row[7:12], expected_bdag, atol=1e-15)

    @pytest.mark.parametrize("dt", [0.01, 0.05, 0.1])
    def test_matches_second_order_taylor(self, system, five_mode_bath, dt):
        step_row = step_coefficients_full(system, five_mode_bath, dt).entries[0]
        coeffs = taylor_coefficients(system, five_mode_bath, 40, max_g_order=2)
        taylor_row = taylor_annihilation_row(coeffs, dt, g_orders=(0, 1, 2))
        assert np.max(np.abs(step_row - taylor_row)) <= 1e-10

    def test_matches_taylor_for_second_system(self, two_system_bath):
        system, bath = two_system_bath
        step_row = step_coefficients_full(system, bath, 0.05).entries[1]
        coeffs = taylor_coefficients(system, bath, 40, mode=1, max_g_order=2)
        taylor_row = taylor_annihilation_row(coeffs, 0.05, g_orders=(0, 1, 2))
        assert np.max(np.abs(step_row - taylor_row)) <= 1e-10

    @pytest.mark.parametrize("detuning", [1e-9, 1e-7, -1e-7, 0.99e-6, 1.01e-6, -1.01e-6])
    @pytest.mark.parametrize("mode", [CouplingMode.FULL_COUPLING, CouplingMode.RWA])
    def test_resonant_mode_is_continuous(self, system, detuning, mode):
        couplings = np.array([[0.05, 0.03]])
        exact = DiscretizedBath(omegas=np.array([0.5, 1.0]), couplings=couplings)
        nearby = DiscretizedBath(omegas=np.array([0.5, 1.0 + detuning]), couplings=couplings)
        a = step_matrix(system, exact, 0.1, mode).entries
        b = step_matrix(system, nearby, 0.1, mode).entries
        assert np.all(np.isfinite(a))
        assert np.all(np.isfinite(b))
        assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))

    def test_cached_per_dt(self, system, small_bath):
        first = step_matrix(system, small_bath, 0.02, CouplingMode.RWA)
        assert step_matrix(system, small_bath, 0.02, CouplingMode.RWA) is first
        clear_step_cache()
        rebuilt = step_matrix(system, small_bath, 0.02, CouplingMode.RWA)
        assert rebuilt is not first
        assert np.array_equal(rebuilt.entries, first.entries)

    def test_non_positive_dt_rejected(self, system, small_bath):
        with pytest.raises(DomainError, match="time step"):
            step_coefficients_full(system, small_bath, 0.0)

    def test_mismatched_coupling_rows_rejected(self, two_system_bath, small_bath):
        system, _ = two_system_bath
        with pytest.raises(DomainError, match="rows"):
            step_coefficients_full(system, small_bath, 0.1)


class TestTaylor:
    """Tests for the nested-commutator recurrence."""

    def test_first_terms(self, system, five_mode_bath):
        coeffs = taylor_coefficients(system, five_mode_bath, 2)
        n = coeffs.n
        assert coeffs.vectors[0, 0] == 1.0
        assert coeffs.vectors[1, n] == 1.0  # w0 P_a
        g = five_mode_bath.couplings[0]
        assert np.allclose(coeffs.vectors[2, 1:n], 2 * g)

    def test_g_orders_sum_to_full_vectors(self, system, five_mode_bath):
        coeffs = taylor_coefficients(system, five_mode_bath, 6, max_g_order=6)
        assert np.allclose(coeffs.by_g_order.sum(axis=1), coeffs.vectors, atol=1e-14)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_closed_forms(self, system, five_mode_bath, n):
        coeffs = taylor_coefficients(system, five_mode_bath, 2 * n + 1, max_g_order=2)
        closed = closed_form_taylor(system, five_mode_bath, n)
        pairs = {
            "T2n_1": coeffs.by_g_order[2 * n, 1],
            "T2n_2": coeffs.by_g_order[2 * n, 2],
            "T2n1_1": coeffs.by_g_order[2 * n + 1, 1],
            "T2n1_2": coeffs.by_g_order[2 * n + 1, 2],
        }
        for name, recurrence in pairs.items():
            scale = max(np.max(np.abs(recurrence)), np.max(np.abs(closed[name])))
            assert np.max(np.abs(closed[name] - recurrence)) <= 1e-12 * scale, name

    def test_closed_forms_reject_resonance(self, system):
        bath = DiscretizedBath(omegas=np.array([1.0]), couplings=np.array([[0.1]]))
        with pytest.raises(DegenerateSpectrumError):
            closed_form_taylor(system, bath, 2)

    def test_free_evolution(self, system, free_bath):
        coeffs = taylor_coefficients(system, free_bath, 40)
        x_t = taylor_evaluate(coeffs, 0.8)
        n = coeffs.n
        assert x_t[0] == pytest.approx(np.exp(-0.8j))
        assert x_t[n] == pytest.approx(np.exp(0.8j))
        row = taylor_annihilation_row(coeffs, 0.8)
        assert row[0] == pytest.approx(np.exp(-0.8j))
        assert abs(row[n]) < 1e-14

    def test_matches_normal_mode_propagator(self, system):
        bath = DiscretizedBath(omegas=np.array([2.0]), couplings=np.array([[0.1]]))
        coeffs = taylor_coefficients(system, bath, 40)
        exact = exact_propagator(system, bath, 0.5).entries
        n = coeffs.n
        x_t = taylor_evaluate(coeffs, 0.5)
        assert np.max(np.abs(x_t - (exact[0] + exact[n]))) <= 1e-10
        assert np.max(np.abs(taylor_annihilation_row(coeffs, 0.5) - exact[0])) <= 1e-10

    def test_truncation_detected(self, system, five_mode_bath):
        coeffs = taylor_coefficients(system, five_mode_bath, 5)
        with pytest.raises(TruncationError) as excinfo:
            taylor_evaluate(coeffs, 3.0)
        assert excinfo.value.achieved_bound > 1e-12

    def test_untracked_order_rejected(self, system, five_mode_bath):
        coeffs = taylor_coefficients(system, five_mode_bath, 10, max_g_order=2)
        with pytest.raises(DomainError, match="g-order"):
            taylor_evaluate(coeffs, 0.1, g_orders=(3,))

    def test_to_ladder(self):
        ladder = to_ladder(np.array([1.0, 2.0, 0.5, -1.0]))
        assert np.array_equal(ladder, [0.5, 3.0, 1.5, 1.0])


class TestChainTerm:
    """Tests for the all-order chain sums."""

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_order_tagged_taylor(self, system, five_mode_bath, n):
        t = 1.0
        chain = chain_term(system, five_mode_bath, n, t)[0]
        coeffs = taylor_coefficients(system, five_mode_bath, 80, max_g_order=6)
        reference = taylor_evaluate(coeffs, t, g_orders=(2 * n - 1, 2 * n))
        scale = max(1.0, float(np.max(np.abs(reference))))
        assert np.max(np.abs(chain - reference)) / scale <= 1e-8

    def test_two_systems(self, two_system_bath):
        system, bath = two_system_bath
        chain = chain_term(system, bath, 2, 0.5)
        assert chain.shape == (2, 12)
        coeffs = taylor_coefficients(system, bath, 60, mode=1, max_g_order=4)
        reference = taylor_evaluate(coeffs, 0.5, g_orders=(3, 4))
        assert np.max(np.abs(chain[1] - reference)) <= 1e-8

    @pytest.mark.parametrize("n", [0, 4])
    def test_order_out_of_range(self, system, five_mode_bath, n):
        with pytest.raises(DomainError, match="chain index"):
            chain_term(system, five_mode_bath, n, 1.0)

    def test_degenerate_frequencies(self, system):
        bath = DiscretizedBath(omegas=np.array([0.5, 1.0]), couplings=np.array([[0.1, 0.1]]))
        with pytest.raises(DegenerateSpectrumError) as excinfo:
            chain_term(system, bath, 1, 1.0)
        assert excinfo.value.pair == (1.0, 1.0)


class TestSecondOrderClosedForm:
    """Tests for the displayed second-order coefficients."""

    def test_finite_off_resonance(self, five_mode_bath):
        coef_a, coef_adag = eq2a_second_order(
            1.0, five_mode_bath.omegas, five_mode_bath.couplings[0], 0.1
        )
        assert np.isfinite(coef_a) and np.isfinite(coef_adag)

    def test_vanishes_at_zero_time(self, five_mode_bath):
        coef_a, coef_adag = eq2a_second_order(
            1.0, five_mode_bath.omegas, five_mode_bath.couplings[0], 0.0
        )
        assert abs(coef_a) < 1e-15
        assert abs(coef_adag) < 1e-15

    def test_resonance_rejected(self):
        with pytest.raises(DomainError, match="non-resonant"):
            eq2a_second_order(1.0, np.array([1.0]), np.array([0.1]), 0.1)
