"""Exact finite-bath evolution through the normal modes of the potential matrix."""

from functools import lru_cache
from typing import Iterable, Tuple

import numpy as np
from scipy import linalg

from ..bch.models import BogoliubovMatrix, SystemSpec
from ..spectral.models import DiscretizedBath
from ..utils.errors import DomainError, NumericalError
from ..utils.logger import setup_logger
from .models import NormalModes, PotentialMatrix

logger = setup_logger(__name__)

RESIDUAL_TOLERANCE = 1e-9
ZERO_EIGENVALUE_RELATIVE = 1e-12


def build_potential_matrix(system: SystemSpec, bath: DiscretizedBath) -> PotentialMatrix:
    """
    Potential matrix over (systems, bath).

    Args:
        system: System oscillators
        bath: Discretized bath with one coupling row per system oscillator

    Returns:
        PotentialMatrix

    Raises:
        DomainError: If bath.couplings has the wrong number of rows
    """
    if bath.n_systems != system.n_systems:
        raise DomainError(
            f"bath couplings have {bath.n_systems} rows for {system.n_systems} system oscillators"
        )
    s_count = system.n_systems
    w = np.concatenate([system.omegas, bath.omegas])
    entries = np.diag(w**2)
    block = 2.0 * bath.couplings * np.sqrt(np.outer(system.omegas, bath.omegas))
    entries[:s_count, s_count:] = block
    entries[s_count:, :s_count] = block.T
    return PotentialMatrix(entries=entries, n_systems=s_count)


@lru_cache(maxsize=16)
def _cached_modes(key: bytes, size: int) -> NormalModes:
    entries = np.frombuffer(key, dtype=float).reshape(size, size)
    eigenvalues, eigenvectors = linalg.eigh(entries)
    scale = max(float(np.max(np.abs(entries))), 1.0)
    residual = float(np.max(np.abs(entries @ eigenvectors - eigenvectors * eigenvalues))) / scale
    if not np.isfinite(residual) or residual > RESIDUAL_TOLERANCE:
        raise NumericalError("eigendecomposition of V failed its residual check", residual)
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    logger.debug(
        f"Diagonalized V ({size}x{size}): lambda in [{eigenvalues[0]:.6e}, {eigenvalues[-1]:.6e}], "
        f"residual {residual:.2e}"
    )
    return NormalModes(eigenvalues=eigenvalues, eigenvectors=eigenvectors, residual=residual)


def normal_modes(potential: PotentialMatrix) -> NormalModes:
    """
    Eigendecomposition of V, cached per matrix content.

    Raises:
        NumericalError: If the eigensolver fails or the residual exceeds 1e-9 relative
    """
    try:
        return _cached_modes(np.ascontiguousarray(potential.entries).tobytes(), potential.size)
    except linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver did not converge: {e}") from e


def _mode_functions(
    eigenvalues: np.ndarray, t: float, norm: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """cos(sqrt(l) t), sin(sqrt(l) t)/sqrt(l) and l sin(sqrt(l) t)/sqrt(l) per eigenvalue."""
    lam = np.asarray(eigenvalues, dtype=float)
    zero = np.abs(lam) < ZERO_EIGENVALUE_RELATIVE * norm
    root = np.sqrt(np.abs(lam))
    safe_root = np.where(zero, 1.0, root)

    cosine = np.where(lam > 0, np.cos(root * t), np.cosh(root * t))
    sine = np.where(lam > 0, np.sin(root * t), np.sinh(root * t)) / safe_root
    cosine = np.where(zero, 1.0, cosine)
    sine = np.where(zero, t, sine)
    return cosine, sine, lam * sine


def phase_space_propagator(system: SystemSpec, bath: DiscretizedBath, t: float) -> np.ndarray:
    """
    Real map (x(t), p(t)) = Phi (x(0), p(0)).

    Phi = [[C, S], [-V S, C]] with C = cos(sqrt(V) t) and S = sin(sqrt(V) t)/sqrt(V);
    negative eigenvalues switch to cosh/sinh, zero eigenvalues to (1, t).
    """
    potential = build_potential_matrix(system, bath)
    modes = normal_modes(potential)
    q = modes.eigenvectors
    cosine, sine, lam_sine = _mode_functions(modes.eigenvalues, t, potential.norm)
    c = (q * cosine) @ q.T
    s = (q * sine) @ q.T
    sp = -(q * lam_sine) @ q.T
    return np.block([[c, s], [sp, c]])


def phase_space_energy(potential: PotentialMatrix, x: np.ndarray, p: np.ndarray) -> float:
    """1/2 p^T p + 1/2 x^T V x."""
    return float(0.5 * p @ p + 0.5 * x @ potential.entries @ x)


def _ladder_scales(system: SystemSpec, bath: DiscretizedBath) -> Tuple[np.ndarray, np.ndarray]:
    """sqrt(w/2) and 1/sqrt(2w) for each mode's own frequency."""
    w = np.concatenate([system.omegas, bath.omegas])
    return np.sqrt(w / 2.0), 1.0 / np.sqrt(2.0 * w)


def _ladder_rows(
    c: np.ndarray, s: np.ndarray, sp: np.ndarray, row_a: np.ndarray, row_b: np.ndarray,
    col_a: np.ndarray, col_b: np.ndarray,
) -> np.ndarray:
    """
    Annihilation rows of the ladder-basis matrix from phase-space blocks.

    a = sqrt(w/2) x + i p/sqrt(2w), x = (a + a^+)/sqrt(2w), p = i sqrt(w/2)(a^+ - a).
    """
    to_a_x = c * col_b - 1j * s * col_a
    to_adag_x = c * col_b + 1j * s * col_a
    to_a_p = sp * col_b - 1j * c * col_a
    to_adag_p = sp * col_b + 1j * c * col_a
    left = row_a[:, None] * to_a_x + 1j * row_b[:, None] * to_a_p
    right = row_a[:, None] * to_adag_x + 1j * row_b[:, None] * to_adag_p
    return np.hstack([left, right])


def exact_propagator(system: SystemSpec, bath: DiscretizedBath, t: float) -> BogoliubovMatrix:
    """
    Exact Bogoliubov matrix of the finite system-plus-bath at time t.

    Args:
        system: System oscillators
        bath: Discretized bath
        t: Time (any sign)

    Returns:
        BogoliubovMatrix in the (a, b, a^+, b^+) ordering

    Raises:
        NumericalError: If the eigendecomposition fails
    """
    phi = phase_space_propagator(system, bath, t)
    n = phi.shape[0] // 2
    c, s, sp = phi[:n, :n], phi[:n, n:], phi[n:, :n]
    scale_a, scale_b = _ladder_scales(system, bath)
    rows = _ladder_rows(c, s, sp, scale_a, scale_b, scale_a, scale_b)
    return BogoliubovMatrix.from_annihilation_rows(rows, float(t), system.n_systems)


def exact_system_rows(
    system: SystemSpec, bath: DiscretizedBath, times: Iterable[float]
) -> np.ndarray:
    """
    Rows a_1..a_S of the exact propagator at many times.

    Args:
        system: System oscillators
        bath: Discretized bath
        times: Sample times

    Returns:
        Complex array of shape (len(times), S, 2(S+K))
    """
    potential = build_potential_matrix(system, bath)
    modes = normal_modes(potential)
    q = modes.eigenvectors
    q_sys = q[: system.n_systems]
    scale_a, scale_b = _ladder_scales(system, bath)
    row_a, row_b = scale_a[: system.n_systems], scale_b[: system.n_systems]

    sample_times = np.asarray(list(times), dtype=float)
    out = np.empty((sample_times.size, system.n_systems, 2 * potential.size), dtype=complex)
    for index, t in enumerate(sample_times):
        cosine, sine, lam_sine = _mode_functions(modes.eigenvalues, t, potential.norm)
        c = (q_sys * cosine) @ q.T
        s = (q_sys * sine) @ q.T
        sp = -(q_sys * lam_sine) @ q.T
        out[index] = _ladder_rows(c, s, sp, row_a, row_b, scale_a, scale_b)
    return out
