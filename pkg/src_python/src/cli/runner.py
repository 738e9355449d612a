"""
Workflows behind the openqosc subcommands.

Each run_* function takes a validated configuration, writes its result files
under the output directory and returns an exit code.
"""

from concurrent.futures import ProcessPoolExecutor
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..bch import SystemSpec
from ..config import RunConfig, SweepConfig
from ..oracle import build_potential_matrix, classify_stability, locate_critical_coupling
from ..propagator import GreenTrace, compose, expectation_x_trace, oscillation_onset, resolve_config
from ..spectral import (
    DiscretizedBath,
    Lorentzian,
    OhmicFamily,
    discretize,
    ohmic_critical_coupling,
    stability_integral,
)
from ..utils.errors import ConfigurationError, DomainError, InsufficientDataError, OpenQoscError
from ..utils.logger import set_log_level, setup_logger
from .output import (
    ensure_output_dir,
    point_filename,
    sidecar_path,
    write_series_csv,
    write_sidecar,
    write_summary_csv,
    write_text,
    write_trace_csv,
)
from .validation import format_table, run_checks

logger = setup_logger(__name__)

ORACLE_MODE_LIMIT = 4096


class ExitCode(IntEnum):
    OK = 0
    UNEXPECTED = 1
    CONFIGURATION = 2
    INSTABILITY = 3
    VALIDATION = 4
    IO = 5
    INTERRUPTED = 130


def prepare(cfg: RunConfig) -> Tuple[SystemSpec, DiscretizedBath]:
    """System spec and discretized bath of a run."""
    system = cfg.system_spec()
    bath = discretize(cfg.spectral_density(), cfg.grid, n_systems=system.n_systems)
    logger.info(
        f"Discretized {cfg.spectral.family.value} bath into {bath.n_modes} modes "
        f"on [{bath.metadata.get('omega_min')}, {bath.metadata.get('omega_max')}]"
    )
    return system, bath


def _onset(trace: GreenTrace) -> Optional[float]:
    try:
        return oscillation_onset(trace)
    except InsufficientDataError:
        return None


def measured_values(bath: DiscretizedBath, trace: GreenTrace) -> Dict[str, Any]:
    """Quantities recorded under result.* in the sidecar."""
    return {
        "n_modes": bath.n_modes,
        "omega_max": bath.metadata.get("omega_max"),
        "spacing": bath.spacing,
        "sum_g2": float(np.sum(bath.couplings[0] ** 2)),
        "dt": trace.dt,
        "n_steps": trace.metadata.get("n_steps"),
        "t_rec": trace.metadata.get("t_rec"),
        "echo_warning": trace.metadata.get("echo_warning", False),
        "unstable": trace.unstable,
        "aborted_at": trace.aborted_at,
        "final_defect": trace.final_defect,
        "onset": _onset(trace),
        "sup_abs_u": trace.sup_abs_u(),
    }


def write_run(
    cfg: RunConfig, system: SystemSpec, bath: DiscretizedBath, out_dir: Path, stem: str
) -> Tuple[GreenTrace, Dict[str, Any]]:
    """Propagate one configuration and write `<stem>.csv`, `<stem>.x.csv` and `<stem>.meta`."""
    trace = compose(system, bath, cfg.propagation)

    csv_path = out_dir / f"{stem}.csv"
    write_trace_csv(csv_path, trace)
    if system.n_systems == 1:
        x_values = expectation_x_trace(trace, cfg.system.alpha, system.omega0)
        write_series_csv(out_dir / f"{stem}.x.csv", ("t", "x"), (trace.times, x_values))

    measured = measured_values(bath, trace)
    write_sidecar(sidecar_path(csv_path), cfg, measured)
    return trace, measured


def run_propagate(cfg: RunConfig) -> int:
    """
    Propagate u(t) and write the trace CSV with its metadata sidecar.

    Returns:
        ExitCode.OK, or ExitCode.INSTABILITY when the run aborted on overflow
    """
    out_dir = ensure_output_dir(cfg.output.path)
    system, bath = prepare(cfg)
    trace, measured = write_run(cfg, system, bath, out_dir, cfg.output.prefix)
    logger.info(
        f"Trace finished: {len(trace)} samples, sup|u| = {measured['sup_abs_u']:.6g}, "
        f"defect = {measured['final_defect']:.3e}"
    )
    logger.info(f"Wrote {out_dir / (cfg.output.prefix + '.csv')}")

    if trace.unstable:
        logger.error(f"Propagation aborted at t = {trace.aborted_at}: instability")
        return ExitCode.INSTABILITY
    return ExitCode.OK


def stability_lines(cfg: RunConfig) -> List[str]:
    """Text of the stability report."""
    system, bath = prepare(cfg)
    spec = cfg.spectral_density()
    report = classify_stability(build_potential_matrix(system, bath), system, bath, spec)
    lines = [f"family                = {cfg.spectral.family.value}"]
    lines.extend(report.lines())

    continuum = stability_integral(spec, system.omega0)
    if continuum.diverged:
        lines.append("continuum integral    = diverges")
        if isinstance(spec, Lorentzian):
            message = (
                "WARNING: the stability integral does not converge at small frequency; "
                "any non-zero coupling leads to unphysical results"
            )
            logger.warning(message)
            lines.append(message)
    else:
        verdict = "stable" if continuum.stable else "unstable"
        lines.append(f"continuum integral    = {continuum.value:.10f} ({verdict})")

    if isinstance(spec, OhmicFamily):
        try:
            eta_m = ohmic_critical_coupling(spec, system.omega0)
        except DomainError as e:
            lines.append(f"eta_M                 = n/a ({e})")
        else:
            if spec.eta > eta_m:
                lines.append(f"note: eta = {spec.eta:g} exceeds eta_M = {eta_m:.3f}")
        if bath.n_modes <= ORACLE_MODE_LIMIT:
            try:
                estimate = locate_critical_coupling(system, spec, cfg.grid)
            except DomainError as e:
                lines.append(f"eta_c (discrete)      = n/a ({e})")
            else:
                lines.append(f"eta_c (eigenvalue)    = {estimate.eta_eigenvalue:.10f}")
                lines.append(f"eta_c (criterion)     = {estimate.eta_criterion:.10f}")
    return lines


def run_stability(cfg: RunConfig) -> int:
    """Print the stability report and write stability.txt."""
    lines = stability_lines(cfg)
    for line in lines:
        print(line)
    out_dir = ensure_output_dir(cfg.output.path)
    path = write_text(out_dir / "stability.txt", lines)
    logger.info(f"Wrote {path}")
    return ExitCode.OK


def sweep_point(task: Tuple[int, str, Any, RunConfig, str]) -> Dict[str, Any]:
    """
    Run one sweep point and write its files.

    Runs in a worker process; failures are returned in the summary row.
    """
    index, axis, value, point, out_dir = task
    set_log_level(point.log_level)
    row: Dict[str, Any] = {"index": index, "axis": axis, "value": value}
    try:
        errors = point.validate()
        if errors:
            raise ConfigurationError(errors)
        stem = Path(point_filename(index, axis, value, suffix="")).name
        system, bath = prepare(point)
        trace, measured = write_run(point, system, bath, Path(out_dir), stem)
        classification = None
        if bath.n_modes <= ORACLE_MODE_LIMIT:
            potential = build_potential_matrix(system, bath)
            classification = classify_stability(potential, system, bath).classification.value
        row.update(
            classification=classification,
            onset=measured["onset"],
            sup_abs_u=measured["sup_abs_u"],
            final_defect=measured["final_defect"],
            unstable=trace.unstable,
            status="aborted" if trace.unstable else "ok",
        )
    except (OpenQoscError, ValueError, OSError) as e:
        logger.warning(f"Sweep point {axis}={value} failed: {e}")
        row["status"] = f"error: {str(e).splitlines()[0]}"
    return row


def run_sweep(sweep: SweepConfig) -> int:
    """
    Run every axis point and assemble summary.csv once all are done.

    Points are independent tasks writing their own files, so the output does
    not depend on the parallelism setting.
    """
    errors = sweep.validate()
    if errors:
        raise ConfigurationError(errors)
    out_dir = ensure_output_dir(sweep.base.output.path)
    tasks = [
        (index, sweep.axis, value, sweep.point_config(value), str(out_dir))
        for index, value in enumerate(sweep.values)
    ]
    logger.info(
        f"Sweeping {sweep.axis} over {len(tasks)} points with parallelism {sweep.parallelism}"
    )

    if sweep.parallelism == 1:
        rows = [sweep_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(sweep.parallelism, len(tasks))) as pool:
            rows = list(pool.map(sweep_point, tasks))

    summary = write_summary_csv(out_dir / "summary.csv", rows)
    failed = [row for row in rows if str(row.get("status", "")).startswith("error")]
    logger.info(f"Wrote {summary} ({len(rows) - len(failed)} ok, {len(failed)} failed)")
    return ExitCode.OK


def run_validate(cfg: RunConfig) -> int:
    """
    Run the cross-check matrix and write validation.txt.

    Returns:
        ExitCode.OK, or ExitCode.VALIDATION if any check fails

    Raises:
        ConfigurationError: If the bath is too large for the oracle
    """
    if cfg.grid.n_modes > ORACLE_MODE_LIMIT:
        raise ConfigurationError(
            [f"validation needs grid.n_modes <= {ORACLE_MODE_LIMIT} (got {cfg.grid.n_modes})"]
        )
    system, bath = prepare(cfg)
    propagation = resolve_config(system, bath, cfg.propagation)
    checks = run_checks(system, bath, propagation)

    lines = format_table(checks)
    for line in lines:
        print(line)
    out_dir = ensure_output_dir(cfg.output.path)
    write_text(out_dir / "validation.txt", lines)

    if any(check.failed for check in checks):
        return ExitCode.VALIDATION
    return ExitCode.OK

