"""
Nested-commutator (Taylor) expansion of the Heisenberg operators.

With X_j = a_j + a_j^+ and P_j = a_j^+ - a_j the commutators with H are

    [H, X_j] = w_j P_j,    [H, P_j] = w_j X_j + 2 sum_l G_jl X_l,

so T_n = [H, T_{n-1}] acts on coefficient vectors (c_X, c_P) through
[[0, W + 2G], [W, 0]]. Splitting that matrix into its free part and the
coupling part tracks every T_n order by order in g.
"""

from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from ..spectral.models import DiscretizedBath
from ..utils.errors import DegenerateSpectrumError, DomainError, TruncationError
from ..utils.logger import setup_logger
from .divided import resonance_threshold
from .models import SystemSpec, TaylorCoefficients

logger = setup_logger(__name__)

LAST_TERM_RELATIVE = 1e-12
DEFAULT_MAX_G_ORDER = 4


def _frequencies(system: SystemSpec, bath: DiscretizedBath) -> np.ndarray:
    return np.concatenate([system.omegas, bath.omegas])


def _adjacency(system: SystemSpec, bath: DiscretizedBath) -> np.ndarray:
    """Symmetric coupling matrix G over (systems, bath)."""
    s_count, n = system.n_systems, system.n_systems + bath.n_modes
    adjacency = np.zeros((n, n))
    adjacency[:s_count, s_count:] = bath.couplings
    adjacency[s_count:, :s_count] = bath.couplings.T
    return adjacency


def commutator_generators(
    system: SystemSpec, bath: DiscretizedBath
) -> Tuple[np.ndarray, np.ndarray]:
    """Free and coupling parts of the commutator action on (c_X, c_P)."""
    w = _frequencies(system, bath)
    n = w.size
    zero = np.zeros((n, n))
    free = np.block([[zero, np.diag(w)], [np.diag(w), zero]])
    coupling = np.block([[zero, 2.0 * _adjacency(system, bath)], [zero, zero]])
    return free, coupling


def taylor_coefficients(
    system: SystemSpec,
    bath: DiscretizedBath,
    order: int,
    mode: int = 0,
    max_g_order: int = DEFAULT_MAX_G_ORDER,
) -> TaylorCoefficients:
    """
    Compute T_0..T_order starting from T_0 = X of the given mode.

    Args:
        system: System oscillators
        bath: Discretized bath
        order: Highest commutator depth N (>= 0)
        mode: Index of the starting oscillator (systems first, then bath)
        max_g_order: Highest coupling order kept in the per-order split

    Returns:
        TaylorCoefficients; even T_n live on X components, odd T_n on P components

    Raises:
        DomainError: If order < 0 or mode is out of range
    """
    if order < 0:
        raise DomainError(f"Taylor order must be >= 0 (got {order})")
    free, coupling = commutator_generators(system, bath)
    n = free.shape[0] // 2
    if not 0 <= mode < n:
        raise DomainError(f"mode index {mode} outside 0..{n - 1}")

    full = free + coupling
    vectors = np.zeros((order + 1, 2 * n))
    by_order = np.zeros((order + 1, max_g_order + 1, 2 * n))
    vectors[0, mode] = 1.0
    by_order[0, 0, mode] = 1.0

    for index in range(1, order + 1):
        vectors[index] = full @ vectors[index - 1]
        previous = by_order[index - 1]
        by_order[index, 0] = free @ previous[0]
        for m in range(1, max_g_order + 1):
            by_order[index, m] = free @ previous[m] + coupling @ previous[m - 1]

    logger.debug(f"Taylor recurrence: N={order}, n={n}, max|T_N|={np.max(np.abs(vectors[-1])):.3e}")
    return TaylorCoefficients(
        vectors=vectors,
        by_g_order=by_order,
        frequencies=_frequencies(system, bath),
        n_systems=system.n_systems,
        mode=mode,
    )


def _normalize_orders(g_orders: Optional[Iterable[int]]) -> Optional[Tuple[int, ...]]:
    return None if g_orders is None else tuple(int(m) for m in g_orders)


def _partial_sum(vectors: np.ndarray, t: float, label: str) -> np.ndarray:
    """sum_n (it)^n/n! vectors[n] with the last-term convergence test."""
    total = np.zeros(vectors.shape[1], dtype=complex)
    factor = 1.0 + 0.0j
    running_max = 0.0
    last = 0.0
    for index, vector in enumerate(vectors):
        if index:
            factor *= 1j * t / index
        term = factor * vector
        total += term
        last = float(np.max(np.abs(term))) if term.size else 0.0
        running_max = max(running_max, last)

    if running_max > 0 and last > LAST_TERM_RELATIVE * running_max and t != 0:
        raise TruncationError(
            f"{label} series truncated at N={vectors.shape[0] - 1} has not converged at t={t}",
            achieved_bound=last / running_max,
        )
    return total


def to_ladder(xp_vector: np.ndarray) -> np.ndarray:
    """Map coefficients over (X, P) to (a..., a^+...): a gets c_X - c_P, a^+ gets c_X + c_P."""
    n = xp_vector.size // 2
    c_x, c_p = xp_vector[:n], xp_vector[n:]
    return np.concatenate([c_x - c_p, c_x + c_p])


def taylor_evaluate(
    coeffs: TaylorCoefficients, t: float, g_orders: Optional[Iterable[int]] = None
) -> np.ndarray:
    """
    Ladder coefficients of X(t) = sum_n (it)^n/n! T_n.

    Args:
        coeffs: Output of taylor_coefficients
        t: Time
        g_orders: Coupling orders to keep (all when None)

    Returns:
        Complex vector over (a_1..a_S, b_1..b_K, a_1^+.., b_1^+..)

    Raises:
        TruncationError: If the last kept term exceeds 1e-12 of the largest term
    """
    vectors = coeffs.select(_normalize_orders(g_orders))
    return to_ladder(_partial_sum(vectors, t, "X"))


def taylor_annihilation_row(
    coeffs: TaylorCoefficients, t: float, g_orders: Optional[Iterable[int]] = None
) -> np.ndarray:
    """
    Row of the propagator for the annihilator of the starting mode.

    a(t) = (X(t) - P(t))/2 with P(t) = sum_n (it)^n/n! T_{n+1}/w, since T_1 = w P.
    Uses T_0..T_{N-1} for X and T_1..T_N for P.

    Raises:
        TruncationError: If either partial sum fails its last-term test
        DomainError: If fewer than two Taylor vectors are available
    """
    if coeffs.order < 1:
        raise DomainError("annihilation row needs Taylor order >= 1")
    vectors = coeffs.select(_normalize_orders(g_orders))
    w = coeffs.frequencies[coeffs.mode]
    x_t = to_ladder(_partial_sum(vectors[:-1], t, "X"))
    p_t = to_ladder(_partial_sum(vectors[1:] / w, t, "P"))
    return 0.5 * (x_t - p_t)


def closed_form_taylor(
    system: SystemSpec, bath: DiscretizedBath, n: int
) -> Dict[str, np.ndarray]:
    """
    First- and second-order parts of T_{2n} and T_{2n+1} in closed form.

    With r_k = w_k/w0:
      T_{2n,1}   = 2 sum_k g_k w0 (w0^{2n} - w_k^{2n})/(w0^2 - w_k^2) X_bk
      T_{2n,2}   = 4 sum_k g_k^2 w0^{2n-3} w_k/(r_k^2 - 1) [(r_k^{2n} - 1)/(r_k^2 - 1) - n] X_a
      T_{2n+1,1} = 2 sum_k g_k w0 w_k (w0^{2n} - w_k^{2n})/(w0^2 - w_k^2) P_bk
      T_{2n+1,2} = 4 sum_k g_k^2 w0^{2n-2} w_k/(r_k^2 - 1) [(r_k^{2n} - 1)/(r_k^2 - 1) - n] P_a

    Args:
        system: Single system oscillator
        bath: Bath with no mode resonant with w0
        n: Index (>= 0)

    Returns:
        Mapping "T2n_1", "T2n_2", "T2n1_1", "T2n1_2" to vectors over (X, P)

    Raises:
        DomainError: For several system oscillators or n < 0
        DegenerateSpectrumError: If some w_k equals w0
    """
    if system.n_systems != 1:
        raise DomainError("closed forms are given for a single system oscillator")
    if n < 0:
        raise DomainError(f"n must be >= 0 (got {n})")

    w0 = system.omega0
    w = bath.omegas
    g = bath.couplings[0]
    threshold = resonance_threshold(np.append(w, w0))
    resonant = np.abs(w - w0) < threshold
    if np.any(resonant):
        k = int(np.argmax(resonant))
        raise DegenerateSpectrumError(
            f"bath mode {k} is resonant with the system", pair=(w0, float(w[k]))
        )

    size = 1 + bath.n_modes
    first_even = np.zeros(2 * size)
    second_even = np.zeros(2 * size)
    first_odd = np.zeros(2 * size)
    second_odd = np.zeros(2 * size)

    ratio = (w0 ** (2 * n) - w ** (2 * n)) / (w0**2 - w**2)
    first_even[1:size] = 2.0 * g * w0 * ratio
    first_odd[size + 1 :] = 2.0 * g * w0 * w * ratio

    r2 = (w / w0) ** 2
    bracket = ((r2**n - 1.0) / (r2 - 1.0) - n) / (r2 - 1.0)
    second_even[0] = 4.0 * np.sum(g**2 * w0 ** (2 * n - 3) * w * bracket)
    second_odd[size] = 4.0 * np.sum(g**2 * w0 ** (2 * n - 2) * w * bracket)

    return {
        "T2n_1": first_even,
        "T2n_2": second_even,
        "T2n1_1": first_odd,
        "T2n1_2": second_odd,
    }
