"""Diagnostics extracted from propagators and traces."""

import math
from typing import List, Optional, Tuple

import numpy as np

from ..bch.models import BogoliubovMatrix, SystemSpec
from ..spectral.models import DiscretizedBath
from ..utils.errors import InsufficientDataError
from .models import GreenTrace

COUPLING_STEP_LIMIT = 0.1
PHASE_STEP = 0.1
COUPLING_STEP = 0.05
REBOUND_RELATIVE = 0.01


def green_u(matrix: BogoliubovMatrix, system_index: int = 0) -> complex:
    """u(t) = [a(t), a^+(0)], the (a, a) entry of the propagator."""
    return complex(matrix.entries[system_index, system_index])


def anti_coefficient(matrix: BogoliubovMatrix, system_index: int = 0) -> complex:
    """Coefficient of a^+(0) in a(t)."""
    n = matrix.dimension // 2
    return complex(matrix.entries[system_index, n + system_index])


def bogoliubov_defect(matrix: BogoliubovMatrix) -> float:
    """max |M Sigma M^+ - Sigma|."""
    metric = matrix.basis.metric
    m = matrix.entries
    return float(np.max(np.abs((m * metric) @ m.conj().T - np.diag(metric))))


def system_rows_defect(rows: np.ndarray) -> float:
    """
    Defect restricted to the system rows a_i and their conjugates a_i^+.

    Checks [a_i(t), a_j^+(t)] = delta_ij and [a_i(t), a_j(t)] = 0.
    """
    n = rows.shape[1] // 2
    metric = np.concatenate([np.ones(n), -np.ones(n)])
    conjugate_rows = np.hstack([rows[:, n:].conj(), rows[:, :n].conj()])
    same = (rows * metric) @ rows.conj().T - np.eye(rows.shape[0])
    cross = (rows * metric) @ conjugate_rows.conj().T
    return float(max(np.max(np.abs(same)), np.max(np.abs(cross))))


def expectation_x(matrix: BogoliubovMatrix, alpha: complex, omega0: float) -> float:
    """
    <x(t)> for a coherent system state |alpha> and a vacuum bath (m = hbar = 1).

    <a(t)> = M[a, a] alpha + M[a, a^+] alpha*, <x> = 2 Re<a(t)>/sqrt(2 w0).
    """
    mean_a = green_u(matrix) * alpha + anti_coefficient(matrix) * np.conj(alpha)
    return float(2.0 * np.real(mean_a) / math.sqrt(2.0 * omega0))


def expectation_x_trace(trace: GreenTrace, alpha: complex, omega0: float) -> np.ndarray:
    """expectation_x at every recorded time of a trace."""
    mean_a = trace.u_values * alpha + trace.anti_values * np.conj(alpha)
    return 2.0 * np.real(mean_a) / math.sqrt(2.0 * omega0)


def _strict_minima(values: np.ndarray) -> np.ndarray:
    inner = values[1:-1]
    return np.where((inner < values[:-2]) & (inner < values[2:]))[0] + 1


def _rebounds(values: np.ndarray) -> List[Tuple[int, float]]:
    """(index, rebound height) for every strict local minimum."""
    result = []
    for index in _strict_minima(values):
        following = values[index + 1 :]
        # rise until the next strict local minimum
        later_minima = _strict_minima(following)
        stop = later_minima[0] + 1 if later_minima.size else following.size
        peak = float(np.max(following[:stop]))
        result.append((int(index), peak - float(values[index])))
    return result


def oscillation_onset(trace: GreenTrace) -> Optional[float]:
    """
    Earliest time at which |u| has a strict local minimum followed by a 1% rebound.

    Returns:
        Onset time, or None when |u| never rebounds

    Raises:
        InsufficientDataError: If the trace has fewer than 3 samples
    """
    if len(trace) < 3:
        raise InsufficientDataError(f"onset detection needs >= 3 samples (got {len(trace)})")
    values = trace.abs_u
    for index, rise in _rebounds(values):
        if rise >= REBOUND_RELATIVE * values[index] and rise > 0:
            return float(trace.times[index])
    return None


def oscillation_amplitude(trace: GreenTrace, after: Optional[float] = None) -> float:
    """
    Largest rebound of |u| at or after a time (the onset time by default).

    Returns:
        Rebound height, 0.0 when no oscillation is present
    """
    start = oscillation_onset(trace) if after is None else after
    if start is None:
        return 0.0
    values = trace.abs_u
    heights = [rise for index, rise in _rebounds(values) if trace.times[index] >= start]
    return float(max(heights)) if heights else 0.0


def log_growth_rate(trace: GreenTrace, window: float = 0.25) -> float:
    """
    Least-squares slope of log|u| over the last `window` fraction of the trace.

    Raises:
        InsufficientDataError: If the window holds fewer than 3 samples
    """
    count = max(int(len(trace) * window), 0)
    if count < 3:
        raise InsufficientDataError(f"growth-rate window holds {count} samples, need >= 3")
    times = trace.times[-count:]
    logs = np.log(np.maximum(trace.abs_u[-count:], np.finfo(float).tiny))
    slope, _ = np.polyfit(times, logs, 1)
    return float(slope)


def default_time_step(system: SystemSpec, bath: DiscretizedBath, t_max: float) -> float:
    """
    min(0.1/w_max, 0.05/sqrt(sum g^2)), halved until max|g| dt <= 0.1, then grid-aligned.

    Returns:
        dt with t_max/dt an integer
    """
    frequencies = np.concatenate([system.omegas, bath.omegas])
    dt = PHASE_STEP / float(np.max(frequencies))
    if bath.n_modes:
        total = float(np.max(np.sqrt(np.sum(bath.couplings**2, axis=1))))
        if total > 0:
            dt = min(dt, COUPLING_STEP / total)
        max_g = float(np.max(np.abs(bath.couplings)))
        while max_g * dt > COUPLING_STEP_LIMIT:
            dt *= 0.5
    dt = min(dt, t_max)
    return t_max / math.ceil(t_max / dt - 1e-9)


def recurrence_time(bath: DiscretizedBath) -> Optional[float]:
    """2 pi/dw for uniformly spaced baths, None otherwise."""
    if bath.spacing is None or not bath.spacing > 0:
        return None
    return 2.0 * math.pi / bath.spacing
