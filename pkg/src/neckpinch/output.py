"""Serialization of trajectories and reports.

The CSV column set is stable: t,dt,a_min,b_min,c_max,ratio_max,ecc_bc,ecc_ac,
s_min,rm_max, one row per recorded sample, full-precision decimals. Identical
config in, identical bytes out.
"""

from __future__ import annotations

import json
from pathlib import Path

from .flow import SingularityReport, Trajectory
from .monitors import MonitorReport, TheoremConstants, TypeIReport

CSV_HEADER = "t,dt,a_min,b_min,c_max,ratio_max,ecc_bc,ecc_ac,s_min,rm_max"

_CSV_FIELDS = (
    "t",
    "dt",
    "a_min",
    "b_min",
    "c_max",
    "ratio_max",
    "ecc_bc",
    "ecc_ac",
    "s_min",
    "rm_max",
)


def write_series(traj: Trajectory, path: str | Path) -> None:
    """One CSV row per summary sample; shortest round-trip float formatting."""
    lines = [CSV_HEADER]
    for sample in traj.samples:
        lines.append(",".join(repr(getattr(sample, f)) for f in _CSV_FIELDS))
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary(
    traj: Trajectory,
    report: SingularityReport | None,
    monitor_reports: dict[str, MonitorReport],
    type1: TypeIReport | None,
    theorem_constants: TheoremConstants | None,
    config_echo: dict,
    path: str | Path,
) -> None:
    """JSON run summary: config echo, stop condition, fit, monitors, Type I."""
    doc = {
        "config": config_echo,
        "stop_reason": traj.stop_reason,
        "t_estimate": report.t_estimate if report else None,
        "fit_residual": report.fit_residual if report else None,
        "fit_window": list(report.fit_window) if report else None,
        "a_min_final": traj.samples[-1].a_min,
        "samples": len(traj.samples),
        "monitors": {name: rep.as_dict() for name, rep in monitor_reports.items()},
        "type1": type1.as_dict() if type1 else None,
        "theorem_constants": theorem_constants.as_dict() if theorem_constants else None,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
