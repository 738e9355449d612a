"""Divided differences of exp(z t), cos(sqrt(x) t) and sin(sqrt(x) t)/sqrt(x)."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.linalg import expm

RESONANCE_RELATIVE = 1e-6


def resonance_threshold(frequencies: np.ndarray) -> float:
    """Detuning below which the series-limit branches are used."""
    return RESONANCE_RELATIVE * max(float(np.max(frequencies)), 1.0)


def exp_divided_1(x: np.ndarray, y: np.ndarray, t: float, threshold: float) -> np.ndarray:
    """
    First divided difference of f(z) = exp(z t) at nodes x, y (broadcast).

    Uses expm1 away from resonance and a second-order series in the detuning
    when |x - y| < threshold.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    d = x - y
    z = d * t
    close = np.abs(d) < threshold
    safe_z = np.where(close, 1.0, z)
    phi = np.where(close, 1.0 + z / 2.0 + z * z / 6.0, np.expm1(safe_z) / safe_z)
    return t * np.exp(y * t) * phi


def exp_divided_2(
    x: np.ndarray, y: np.ndarray, z: np.ndarray, t: float, threshold: float
) -> np.ndarray:
    """
    Second divided difference of f(z) = exp(z t) at nodes x, y, z (broadcast).

    The most separated pair become the outer nodes of the recursive formula.
    When all three nodes lie within threshold the expansion about their mean,
    t^2 e^{ct}/2 + t^4 e^{ct} h2(d)/24, is used instead.
    """
    x, y, z = np.broadcast_arrays(
        np.asarray(x, dtype=complex), np.asarray(y, dtype=complex), np.asarray(z, dtype=complex)
    )
    nodes = np.stack([x, y, z])
    # separation of the pair that excludes node 0, 1, 2 respectively
    separations = np.stack([np.abs(y - z), np.abs(x - z), np.abs(x - y)])
    middle = np.argmax(separations, axis=0)
    outer_lo = np.where(middle == 0, 1, 0)
    outer_hi = np.where(middle == 2, 1, 2)

    p = np.take_along_axis(nodes, outer_lo[None], axis=0)[0]
    q = np.take_along_axis(nodes, middle[None], axis=0)[0]
    r = np.take_along_axis(nodes, outer_hi[None], axis=0)[0]

    span = r - p
    clustered = np.abs(span) < threshold
    safe_span = np.where(clustered, 1.0, span)
    recursive = (exp_divided_1(q, r, t, threshold) - exp_divided_1(p, q, t, threshold)) / safe_span

    centre = (x + y + z) / 3.0
    dx, dy, dz = x - centre, y - centre, z - centre
    h2 = dx * dx + dy * dy + dz * dz + dx * dy + dx * dz + dy * dz
    series = np.exp(centre * t) * (t * t / 2.0 + t**4 * h2 / 24.0)

    return np.where(clustered, series, recursive)


def _oscillator_functions(matrix: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """cos(sqrt(Z) t) and sin(sqrt(Z) t)/sqrt(Z) of a square matrix Z."""
    m = matrix.shape[0]
    generator = np.block(
        [[np.zeros((m, m)), t * np.eye(m)], [-t * matrix, np.zeros((m, m))]]
    )
    flow = expm(generator)
    return flow[:m, :m], flow[:m, m:]


@lru_cache(maxsize=65536)
def oscillator_divided_differences(nodes: Tuple[float, ...], t: float) -> Tuple[float, float]:
    """
    Divided differences of cos(sqrt(x) t) and sin(sqrt(x) t)/sqrt(x) over nodes.

    Distinct nodes use the Lagrange sum. Repeated nodes go through the lower
    bidiagonal matrix whose function value carries the divided difference in its
    bottom-left entry, which handles confluence exactly.

    Args:
        nodes: Squared frequencies, order irrelevant
        t: Time

    Returns:
        (cosine divided difference, sine divided difference)
    """
    x = np.array(nodes, dtype=float)
    m = x.size
    if m == 1:
        root = np.sqrt(complex(x[0]))
        cos_value = np.cos(root * t).real
        sin_value = t if x[0] == 0 else (np.sin(root * t) / root).real
        return float(cos_value), float(sin_value)

    if np.unique(x).size == m:
        roots = np.sqrt(x.astype(complex))
        cos_values = np.cos(roots * t).real
        safe_roots = np.where(roots == 0, 1, roots)
        sin_values = np.where(roots == 0, t, np.sin(roots * t) / safe_roots).real
        denominators = np.array(
            [np.prod([x[j] - x[l] for l in range(m) if l != j]) for j in range(m)]
        )
        return float(np.sum(cos_values / denominators)), float(np.sum(sin_values / denominators))

    bidiagonal = np.diag(x) + np.diag(np.ones(m - 1), k=-1)
    cos_matrix, sin_matrix = _oscillator_functions(bidiagonal, t)
    return float(cos_matrix[m - 1, 0]), float(sin_matrix[m - 1, 0])
