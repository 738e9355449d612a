"""
Second-order step matrices of the Heisenberg flow.

The annihilation operators obey dv/dt = (Lambda + A1) v with Lambda the free
phases and A1 the coupling. Truncating the interaction-picture expansion at
second order in A1 gives

    M(dt) = e^{Lambda dt} + M1 + M2,
    M1[j, l] = A1[j, l] e[lam_j, lam_l],
    M2[j, l] = sum_m A1[j, m] A1[m, l] e[lam_j, lam_m, lam_l],

where e[...] are divided differences of exp(z dt). Only the annihilation rows
are built; the creation rows follow by conjugation symmetry.
"""

from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from ..spectral.models import DiscretizedBath
from ..utils.errors import DomainError
from ..utils.logger import setup_logger
from .divided import exp_divided_1, exp_divided_2, resonance_threshold
from .models import BogoliubovMatrix, CouplingMode, SystemSpec

logger = setup_logger(__name__)

# sector sign: annihilators carry phase -i w, creators +i w
ANN, CRE = -1, 1


def _allowed(mode: CouplingMode, row_sector: int) -> Tuple[int, ...]:
    """Column sectors reachable from a row sector through one coupling."""
    if mode is CouplingMode.RWA:
        return (row_sector,)
    return (ANN, CRE)


def _annihilation_rows(
    system_omegas: np.ndarray,
    bath_omegas: np.ndarray,
    couplings: np.ndarray,
    dt: float,
    mode: CouplingMode,
) -> np.ndarray:
    """Rows a_1..a_S, b_1..b_K of the step matrix, shape (S+K, 2(S+K))."""
    big_omega, omega, g = system_omegas, bath_omegas, couplings
    s_count, k_count = big_omega.size, omega.size
    n = s_count + k_count
    threshold = resonance_threshold(np.concatenate([big_omega, omega]))

    def lam(sector: int, w: np.ndarray) -> np.ndarray:
        return sector * 1j * w

    # U: annihilation columns, W: creation columns
    u_ss = np.diag(np.exp(-1j * big_omega * dt)).astype(complex)
    u_bb = np.diag(np.exp(-1j * omega * dt)).astype(complex)
    blocks: Dict[str, np.ndarray] = {
        "u_ss": u_ss,
        "w_ss": np.zeros((s_count, s_count), dtype=complex),
        "u_sb": np.zeros((s_count, k_count), dtype=complex),
        "w_sb": np.zeros((s_count, k_count), dtype=complex),
        "u_bs": np.zeros((k_count, s_count), dtype=complex),
        "w_bs": np.zeros((k_count, s_count), dtype=complex),
        "u_bb": u_bb,
        "w_bb": np.zeros((k_count, k_count), dtype=complex),
    }

    # first order: A1 entry of an annihilation row is -i g
    for col_sector in _allowed(mode, ANN):
        prefix = "u" if col_sector == ANN else "w"
        blocks[f"{prefix}_sb"] += (-1j * g) * exp_divided_1(
            lam(ANN, big_omega)[:, None], lam(col_sector, omega)[None, :], dt, threshold
        )
        blocks[f"{prefix}_bs"] += (-1j * g.T) * exp_divided_1(
            lam(ANN, omega)[:, None], lam(col_sector, big_omega)[None, :], dt, threshold
        )

    # second order: (-i g)(sector_m * i g') = sector_m * g g'
    for mid_sector in _allowed(mode, ANN):
        for col_sector in _allowed(mode, mid_sector):
            prefix = "u" if col_sector == ANN else "w"

            # system row -> bath intermediate -> system column, shape (S, K, S)
            weight = mid_sector * g[:, :, None] * g.T[None, :, :]
            dd = exp_divided_2(
                lam(ANN, big_omega)[:, None, None],
                lam(mid_sector, omega)[None, :, None],
                lam(col_sector, big_omega)[None, None, :],
                dt,
                threshold,
            )
            blocks[f"{prefix}_ss"] += np.sum(weight * dd, axis=1)

            # bath row -> system intermediate -> bath column, shape (K, S, K)
            weight = mid_sector * g.T[:, :, None] * g[None, :, :]
            dd = exp_divided_2(
                lam(ANN, omega)[:, None, None],
                lam(mid_sector, big_omega)[None, :, None],
                lam(col_sector, omega)[None, None, :],
                dt,
                threshold,
            )
            blocks[f"{prefix}_bb"] += np.sum(weight * dd, axis=1)

    rows = np.empty((n, 2 * n), dtype=complex)
    rows[:s_count] = np.hstack([blocks["u_ss"], blocks["u_sb"], blocks["w_ss"], blocks["w_sb"]])
    rows[s_count:] = np.hstack([blocks["u_bs"], blocks["u_bb"], blocks["w_bs"], blocks["w_bb"]])
    return rows


@lru_cache(maxsize=32)
def _cached_step(
    mode_value: str,
    dt: float,
    system_key: bytes,
    bath_key: bytes,
    coupling_key: bytes,
    coupling_shape: Tuple[int, int],
) -> BogoliubovMatrix:
    system_omegas = np.frombuffer(system_key, dtype=float)
    bath_omegas = np.frombuffer(bath_key, dtype=float)
    couplings = np.frombuffer(coupling_key, dtype=float).reshape(coupling_shape)

    rows = _annihilation_rows(system_omegas, bath_omegas, couplings, dt, CouplingMode(mode_value))
    matrix = BogoliubovMatrix.from_annihilation_rows(rows, dt, system_omegas.size)
    logger.debug(
        f"Built {mode_value} step matrix: dt={dt}, dimension={matrix.dimension}, "
        f"max|entry|={np.max(np.abs(matrix.entries)):.6f}"
    )
    return matrix


def step_matrix(
    system: SystemSpec, bath: DiscretizedBath, dt: float, mode: CouplingMode
) -> BogoliubovMatrix:
    """
    Second-order step matrix for either coupling mode.

    Results are cached per (mode, dt, system, bath), so composing a uniform
    grid assembles the matrix once.

    Raises:
        DomainError: If dt <= 0 or the coupling matrix does not match the system
    """
    if not dt > 0:
        raise DomainError(f"time step must be > 0 (got {dt})")
    if bath.n_systems != system.n_systems:
        raise DomainError(
            f"bath couplings have {bath.n_systems} rows for {system.n_systems} system oscillators"
        )
    omegas, couplings, shape = bath.cache_key()
    return _cached_step(
        CouplingMode(mode).value, float(dt), system.cache_key(), omegas, couplings, shape
    )


def step_coefficients_full(
    system: SystemSpec, bath: DiscretizedBath, dt: float
) -> BogoliubovMatrix:
    """
    Step matrix with the full position-position coupling.

    The a-row carries e^{-i w0 dt} on a, g_k(e^{-i w0 dt} - e^{-i w_k dt})/(w0 - w_k) on b_k,
    g_k(e^{-i w0 dt} - e^{i w_k dt})/(w0 + w_k) on b_k^+ and second-order terms on a, a^+.
    Resonant denominators are replaced by their limits.

    Args:
        system: System oscillators
        bath: Discretized bath (one coupling row per system oscillator)
        dt: Step length (> 0)

    Returns:
        BogoliubovMatrix at time dt

    Raises:
        DomainError: If dt <= 0
    """
    return step_matrix(system, bath, dt, CouplingMode.FULL_COUPLING)


def step_coefficients_rwa(
    system: SystemSpec, bath: DiscretizedBath, dt: float
) -> BogoliubovMatrix:
    """
    Step matrix in the rotating-wave approximation.

    Anti-rotating blocks (annihilator to creator) are exactly zero.

    Raises:
        DomainError: If dt <= 0
    """
    return step_matrix(system, bath, dt, CouplingMode.RWA)


def clear_step_cache() -> None:
    _cached_step.cache_clear()


def eq2a_second_order(
    omega0: float, omegas: np.ndarray, couplings: np.ndarray, t: float
) -> Tuple[complex, complex]:
    """
    Second-order a and a^+ coefficients of a(t) in their displayed closed form.

    coef_a  = sum_k -2i g^2/(w0^2 - w^2)^2 [(w0 + w)^2 sin wt + (w0^2 - w^2) w t e^{-i w0 t}
                                             + 2i w0 w (e^{i w t} - e^{-i w0 t})]
    coef_a+ = sum_k 2i g^2/(w0 (w0^2 - w^2)) (w0 sin wt - w sin w0 t)

    Only defined for a single system oscillator with no resonant mode; used to
    cross-check the grouping of terms against step_coefficients_full.

    Raises:
        DomainError: If some w_k is within the resonance threshold of w0
    """
    w = np.asarray(omegas, dtype=float)
    g = np.asarray(couplings, dtype=float).reshape(-1)
    detuning = omega0**2 - w**2
    if np.any(np.abs(omega0 - w) < resonance_threshold(np.append(w, omega0))):
        raise DomainError("closed-form second-order coefficients need non-resonant modes")

    bracket = (
        (omega0 + w) ** 2 * np.sin(w * t)
        + detuning * w * t * np.exp(-1j * omega0 * t)
        + 2j * omega0 * w * (np.exp(1j * w * t) - np.exp(-1j * omega0 * t))
    )
    coef_a = np.sum(-2j * g**2 / detuning**2 * bracket)
    coef_adag = np.sum(
        2j * g**2 / (omega0 * detuning) * (omega0 * np.sin(w * t) - w * np.sin(omega0 * t))
    )
    return complex(coef_a), complex(coef_adag)
