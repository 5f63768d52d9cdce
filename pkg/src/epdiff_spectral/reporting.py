"""Report files and console tables for solver runs and studies

Every CSV starts with ``# key=value`` lines echoing the resolved
configuration and the library version, so a run can be repeated from its
output alone.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np
from rich.table import Table

from . import __version__
from .data.field_io import write_rows
from .experiments.convergence import ConvergenceReport, RowStatus
from .flow.transport import FlowMap
from .integration.integrator import Trajectory

logger = logging.getLogger(__name__)

CONVERGENCE_COLUMNS = ["R", "s", "error_Hm", "energy_drift", "wall_time_s"]


def config_echo(meta: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Configuration header with the library version first"""
    echo: Dict[str, Any] = {"epdiff_spectral_version": __version__}
    echo.update(meta or {})
    return echo


def _s_label(s: float) -> str:
    return f"{s:g}"


def write_convergence_report(
    report: ConvergenceReport, out_dir: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """convergence_s<s>.csv; failed rows keep their R with nan values"""
    header = config_echo(meta)
    header["s"] = _s_label(report.s)
    header["reference_R"] = report.reference_R
    flagged = [
        f"R={row.R} ({row.status.value}: {row.message})"
        for row in report.rows
        if row.status is not RowStatus.OK
    ]
    if flagged:
        header["flagged_rows"] = "; ".join(flagged)
    rows = [
        [row.R, float(row.s), float(row.error_Hm), float(row.energy_drift), float(row.wall_time)]
        for row in report.rows
    ]
    return write_rows(
        Path(out_dir) / f"convergence_s{_s_label(report.s)}.csv",
        CONVERGENCE_COLUMNS,
        rows,
        header,
    )


def write_convergence_summary(
    reports: Sequence[ConvergenceReport], out_dir: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """One row per s; the slope cell stays empty when no rate was fitted"""
    rows = []
    for report in reports:
        ok = sum(1 for row in report.rows if row.status is RowStatus.OK)
        rows.append(
            [
                float(report.s),
                "" if report.fitted_slope is None else float(report.fitted_slope),
                report.reference_R,
                ok,
                len(report.rows) - ok,
            ]
        )
    return write_rows(
        Path(out_dir) / "convergence_summary.csv",
        ["s", "fitted_slope", "reference_R", "rows_ok", "rows_flagged"],
        rows,
        config_echo(meta),
    )


def write_plot_data(
    reports: Sequence[ConvergenceReport], out_dir: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """log2(R) against log10(error) for every successful positive-error row"""
    rows = []
    for report in reports:
        for R, error in report.errors():
            if error > 0 and math.isfinite(error):
                rows.append([float(report.s), math.log2(R), math.log10(error)])
    return write_rows(
        Path(out_dir) / "convergence_plot.dat",
        ["s", "log2_R", "log10_error"],
        rows,
        config_echo(meta),
    )


def write_energy_log(
    traj: Trajectory, path: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    rows = [
        [float(t), float(e), float(np.sqrt(max(e, 0.0)))]
        for t, e in zip(traj.sample_times, traj.energy_log)
    ]
    return write_rows(path, ["t", "energy", "metric_norm"], rows, config_echo(meta))


def write_flow_map(
    flow: FlowMap, path: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """Rows per (node, component i): displacement and Jacobian row i"""
    d, N = flow.d, flow.N
    columns = [f"n_{k + 1}" for k in range(d)] + ["comp", "disp"] + [
        f"jac_{j + 1}" for j in range(d)
    ]
    header = config_echo(meta)
    header["t"] = flow.t
    header["N"] = N
    rows = []
    for p, node in enumerate(np.ndindex(*((N,) * d))):
        for i in range(d):
            rows.append(
                list(node)
                + [i, float(flow.disp[p, i])]
                + [float(v) for v in flow.jac[p, i]]
            )
    return write_rows(path, columns, rows, header)


def write_diagnostics(
    times: Sequence[float],
    energies: Sequence[float],
    residuals: Sequence[float],
    min_dets: Sequence[float],
    path: Path,
    meta: Optional[Mapping[str, Any]] = None,
) -> Path:
    rows = [
        [float(t), float(e), float(r), float(det)]
        for t, e, r, det in zip(times, energies, residuals, min_dets)
    ]
    return write_rows(
        path,
        ["t", "energy", "momentum_residual", "min_jacobian_det"],
        rows,
        config_echo(meta),
    )


def write_key_values(
    values: Mapping[str, Any], path: Path, meta: Optional[Mapping[str, Any]] = None
) -> Path:
    rows = [
        [key, float(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else value]
        for key, value in values.items()
    ]
    return write_rows(path, ["quantity", "value"], rows, config_echo(meta))


def convergence_table(reports: Sequence[ConvergenceReport]) -> Table:
    """Rich table of all rows, one block per s"""
    table = Table(title="Discretization error at t = 1")
    table.add_column("s", justify="right")
    table.add_column("R", justify="right")
    table.add_column("error H^m", justify="right")
    table.add_column("energy drift", justify="right")
    table.add_column("wall time [s]", justify="right")
    table.add_column("status")
    for report in reports:
        for row in report.rows:
            table.add_row(
                _s_label(row.s),
                str(row.R),
                f"{row.error_Hm:.4e}",
                f"{row.energy_drift:.2e}",
                f"{row.wall_time:.2f}",
                row.status.value,
            )
        slope = "-" if report.fitted_slope is None else f"{report.fitted_slope:.3f}"
        table.add_row(_s_label(report.s), "slope", slope, "", "", "", end_section=True)
    return table


def key_value_table(title: str, values: Mapping[str, Any]) -> Table:
    table = Table(title=title)
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in values.items():
        table.add_row(key, f"{value:.6e}" if isinstance(value, float) else str(value))
    return table

