"""CSV traces, metadata sidecars and summary tables."""

import csv
import io
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np

from ..config.config import RESULT_NAMESPACE, RunConfig, write_flat_text
from ..propagator.models import GreenTrace
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

TRACE_COLUMNS = ("t", "re_u", "im_u", "abs_u", "re_anti", "im_anti", "defect")
SUMMARY_COLUMNS = (
    "index",
    "axis",
    "value",
    "classification",
    "onset",
    "sup_abs_u",
    "final_defect",
    "unstable",
    "status",
)


def format_number(value: Any) -> str:
    """Shortest round-trip representation; empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(buffer.getvalue())


def trace_rows(trace: GreenTrace) -> List[List[float]]:
    return [
        [
            float(t),
            float(u.real),
            float(u.imag),
            float(abs(u)),
            float(anti.real),
            float(anti.imag),
            float(defect),
        ]
        for t, u, anti, defect in zip(
            trace.times, trace.u_values, trace.anti_values, trace.defects
        )
    ]


def write_trace_csv(path: Path, trace: GreenTrace) -> Path:
    """Write t, re_u, im_u, abs_u, re_anti, im_anti, defect with LF line endings."""
    _write_csv(path, TRACE_COLUMNS, trace_rows(trace))
    logger.debug(f"Wrote {len(trace)} rows to {path}")
    return path


def write_series_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    _write_csv(path, header, zip(*columns))
    return path


def write_summary_csv(path: Path, rows: Iterable[Mapping[str, Any]]) -> Path:
    _write_csv(path, SUMMARY_COLUMNS, ([row.get(c) for c in SUMMARY_COLUMNS] for row in rows))
    return path


def sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".meta")


def write_sidecar(path: Path, config: RunConfig, measured: Mapping[str, Any]) -> Path:
    """
    Key = value sidecar: the full configuration plus `result.*` measurements.

    The file can be passed back with --config to rerun the same configuration.
    """
    flat: Dict[str, Any] = dict(config.to_flat())
    for key, value in measured.items():
        flat[f"{RESULT_NAMESPACE}{key}"] = _clean(value)
    text = write_flat_text(flat, header=["openqosc run metadata"])
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def _clean(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def write_text(path: Path, lines: Iterable[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    return path


def ensure_output_dir(path: str, create: bool = True) -> Path:
    """
    Output directory, created if missing.

    Raises:
        OSError: If the directory cannot be created or is not writable
    """
    out = Path(path)
    if create:
        out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"Output directory is not writable: {out}")
    return out


def point_filename(index: int, axis: str, value: Any, suffix: str = ".csv") -> str:
    return f"point_{index:03d}_{axis}={format_number(value)}{suffix}"

