"""
All-order chain sums for X_{a,i}(t).

Even and odd commutators resum to X(t) = cos(sqrt(B) t) X(0) + i W sin(sqrt(B) t)/sqrt(B) P(0)
on coefficient vectors, with B = W^2 + 2 G W. Expanding in the coupling part
2 G W gives, at order m, a sum over index chains i_1 -> k_1 -> i_2 -> ... that
alternate between system and bath, each weighted by the product of
2 g w_source along the chain and by the divided difference of the cosine
(or sine) kernel over the squared frequencies visited.
"""

import itertools
from typing import List, Tuple

import numpy as np

from ..spectral.models import DiscretizedBath
from ..utils.errors import DegenerateSpectrumError, DomainError
from ..utils.logger import setup_logger
from .divided import oscillator_divided_differences
from .models import SystemSpec

logger = setup_logger(__name__)

MAX_CHAIN_ORDER = 3
DEGENERACY_RELATIVE = 1e-9


def _check_distinct(frequencies: np.ndarray) -> None:
    order = np.argsort(frequencies)
    ordered = frequencies[order]
    gaps = np.diff(ordered)
    scale = np.maximum(np.abs(ordered[1:]), np.abs(ordered[:-1]))
    close = gaps <= DEGENERACY_RELATIVE * scale
    if np.any(close):
        j = int(np.argmax(close))
        pair = (float(ordered[j]), float(ordered[j + 1]))
        raise DegenerateSpectrumError(
            f"chain sums need pairwise distinct frequencies; {pair[0]} and {pair[1]} coincide",
            pair=pair,
        )


def _chains(start: int, s_count: int, k_count: int, steps: int) -> List[Tuple[int, ...]]:
    """
    Index chains over oscillators (systems 0..S-1, bath S..S+K-1) of the given length.

    Chains start at system oscillator `start` and alternate bath, system, bath, ...
    """
    bath = range(s_count, s_count + k_count)
    systems = range(s_count)
    choices = [bath if step % 2 == 0 else systems for step in range(steps)]
    return [(start,) + tail for tail in itertools.product(*choices)]


def chain_term(system: SystemSpec, bath: DiscretizedBath, n: int, t: float) -> np.ndarray:
    """
    Order 2n-1 and 2n contributions to X_{a,i}(t) in the ladder basis.

    The order 2n-1 chains end on a bath mode and feed X_bk, P_bk; the order 2n
    chains return to a system oscillator and feed X_a, P_a. Cost grows as (S K)^n.

    Args:
        system: System oscillators
        bath: Discretized bath
        n: Chain index, 1 <= n <= 3
        t: Time

    Returns:
        Complex array of shape (S, 2(S+K)); row i adds to the ladder coefficients of X_{a,i}(t)

    Raises:
        DomainError: If n is outside 1..3
        DegenerateSpectrumError: If two frequencies coincide within 1e-9 relative
    """
    if not 1 <= n <= MAX_CHAIN_ORDER:
        raise DomainError(f"chain index must be in 1..{MAX_CHAIN_ORDER} (got {n})")

    w = np.concatenate([system.omegas, bath.omegas])
    _check_distinct(w)

    s_count, k_count = system.n_systems, bath.n_modes
    size = s_count + k_count
    adjacency = np.zeros((size, size))
    adjacency[:s_count, s_count:] = bath.couplings
    adjacency[s_count:, :s_count] = bath.couplings.T
    squared = w**2

    result = np.zeros((s_count, 2 * size), dtype=complex)
    for start in range(s_count):
        c_x = np.zeros(size)
        c_p = np.zeros(size)
        for steps in (2 * n - 1, 2 * n):
            for chain in _chains(start, s_count, k_count, steps):
                weight = 1.0
                for source, target in zip(chain[:-1], chain[1:]):
                    weight *= 2.0 * adjacency[target, source] * w[source]
                if weight == 0.0:
                    continue
                nodes = tuple(sorted(float(squared[j]) for j in chain))
                cos_dd, sin_dd = oscillator_divided_differences(nodes, float(t))
                end = chain[-1]
                c_x[end] += weight * cos_dd
                c_p[end] += weight * w[end] * sin_dd

        # coefficient vector c_X X + i c_P P in ladder form
        p_part = 1j * c_p
        result[start, :size] = c_x - p_part
        result[start, size:] = c_x + p_part

    logger.debug(f"chain_term n={n}, t={t}: max|contribution|={np.max(np.abs(result)):.3e}")
    return result
