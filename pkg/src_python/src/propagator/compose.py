"""Composition of second-order step matrices into long-time propagators."""

import dataclasses
from typing import List, Optional

import numpy as np

from ..bch.models import BogoliubovMatrix, OperatorBasis, SystemSpec
from ..bch.steps import step_matrix
from ..spectral.models import DiscretizedBath
from ..utils.errors import ConfigurationError
from ..utils.logger import setup_logger
from .diagnostics import (
    COUPLING_STEP_LIMIT,
    bogoliubov_defect,
    default_time_step,
    recurrence_time,
    system_rows_defect,
)
from .models import GreenTrace, PropagationConfig

logger = setup_logger(__name__)

ABORT_MAGNITUDE = 1e12


def resolve_config(
    system: SystemSpec, bath: DiscretizedBath, cfg: PropagationConfig
) -> PropagationConfig:
    """Copy of cfg with dt filled in and validated."""
    if cfg.dt is None:
        cfg = dataclasses.replace(cfg, dt=default_time_step(system, bath, cfg.t_max))
        logger.info(f"Using default time step dt={cfg.dt:.6g}")
    errors = cfg.validate()
    if errors:
        raise ConfigurationError(errors)
    return cfg


def compose(
    system: SystemSpec,
    bath: DiscretizedBath,
    cfg: PropagationConfig,
    return_matrix: bool = False,
) -> GreenTrace:
    """
    Propagate M(j dt) = M_step(dt)^j and record u, the anti-coefficient and the defect.

    By default only the system annihilation rows are advanced (R <- R M_step), which
    gives the same u and anti-coefficient as the full product. With
    cfg.full_matrix the whole matrix is advanced and the full defect recorded.

    Args:
        system: System oscillators
        bath: Discretized bath
        cfg: Propagation configuration (dt None means default_time_step)
        return_matrix: Attach the final BogoliubovMatrix (forces full propagation)

    Returns:
        GreenTrace; on overflow (any |entry| > 1e12 or non-finite) the partial trace
        with unstable=True and aborted_at set

    Raises:
        ConfigurationError: If cfg is invalid
    """
    cfg = resolve_config(system, bath, cfg)
    dt = float(cfg.dt)
    n_steps = cfg.n_steps
    full = cfg.full_matrix or return_matrix

    max_g = float(np.max(np.abs(bath.couplings))) if bath.n_modes else 0.0
    if max_g * dt > COUPLING_STEP_LIMIT:
        logger.warning(
            f"max|g_k| dt = {max_g * dt:.3g} exceeds {COUPLING_STEP_LIMIT}; "
            f"second-order steps may be inaccurate"
        )

    metadata = {"n_steps": n_steps, "dt": dt, "mode": cfg.mode.value}
    t_rec = recurrence_time(bath)
    metadata["t_rec"] = t_rec
    metadata["echo_warning"] = bool(t_rec is not None and cfg.t_max > t_rec)
    if metadata["echo_warning"]:
        logger.warning(
            f"t_max = {cfg.t_max} exceeds the recurrence time {t_rec:.4g}; "
            f"discretization echo possible"
        )

    step = step_matrix(system, bath, dt, cfg.mode).entries
    basis = OperatorBasis(system.n_systems, bath.n_modes)
    n = basis.n

    state = np.eye(basis.dimension, dtype=complex)
    if not full:
        state = state[: system.n_systems].copy()

    def defect() -> float:
        if full:
            return bogoliubov_defect(BogoliubovMatrix(state, 0.0, system.n_systems))
        return system_rows_defect(state)

    times: List[float] = [0.0]
    u_values: List[complex] = [complex(state[0, 0])]
    anti_values: List[complex] = [complex(state[0, n])]
    defects: List[float] = [defect()]
    aborted_at: Optional[float] = None

    for j in range(1, n_steps + 1):
        state = state @ step
        magnitude = float(np.max(np.abs(state)))
        finite = np.isfinite(magnitude)
        overflow = not finite or magnitude > ABORT_MAGNITUDE
        if j % cfg.record_stride == 0 or j == n_steps or overflow:
            if finite:
                times.append(j * dt)
                u_values.append(complex(state[0, 0]))
                anti_values.append(complex(state[0, n]))
                defects.append(defect())
        if overflow:
            aborted_at = j * dt
            logger.error(
                f"Propagation aborted at t={aborted_at:.6g}: max|entry| = {magnitude:.3e} "
                f"(instability)"
            )
            break

    final_matrix = None
    if return_matrix and aborted_at is None:
        final_matrix = BogoliubovMatrix(state, n_steps * dt, system.n_systems)

    trace = GreenTrace(
        times=np.array(times),
        u_values=np.array(u_values, dtype=complex),
        anti_values=np.array(anti_values, dtype=complex),
        defects=np.array(defects),
        dt=dt,
        mode=cfg.mode,
        unstable=aborted_at is not None,
        aborted_at=aborted_at,
        final_matrix=final_matrix,
        metadata=metadata,
    )
    logger.info(
        f"Composed {len(trace)} samples up to "
        f"t={trace.times[-1]:.6g} ({cfg.mode.value}), final defect {trace.final_defect:.3e}"
    )
    return trace
