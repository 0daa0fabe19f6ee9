"""Deterministic CSV/JSON writers and the run manifest.

Trajectory and field CSVs use 17-significant-digit floats; everything
else uses Python's shortest round-trip representation.  Both formats
read back to the identical double, so re-running an identical
configuration reproduces every data file byte for byte.  All text
output uses LF line endings regardless of platform.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .bloch import BlochTrajectory, FieldProtocol
from .multispin import RobustnessReport, ScanGrid

__all__ = [
    "write_trajectory_csv",
    "write_field_csv",
    "write_protocol_json",
    "write_scan_grid_csv",
    "write_scan_grid_json",
    "write_robustness_json",
    "write_columns_csv",
    "sha256_file",
    "write_manifest",
]


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _open_lf(path):
    return open(path, "w", newline="\n")


def write_trajectory_csv(path, traj: BlochTrajectory) -> None:
    with _open_lf(path) as fh:
        fh.write("t,sx,sy,sz\n")
        for t, (sx, sy, sz) in zip(traj.times, traj.vectors):
            fh.write(f"{_f17(t)},{_f17(sx)},{_f17(sy)},{_f17(sz)}\n")


def write_field_csv(path, field: FieldProtocol, n_samples: int = 2001) -> None:
    times, b = field.samples(n_samples)
    with _open_lf(path) as fh:
        fh.write("t,Bx,By,Bz\n")
        for t, (bx, by, bz) in zip(times, b):
            fh.write(f"{_f17(t)},{_f17(bx)},{_f17(by)},{_f17(bz)}\n")


def write_protocol_json(path, field: FieldProtocol) -> None:
    doc = {"t_f": field.t_f}
    doc.update(field.metadata)
    with _open_lf(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_scan_grid_csv(path, grid: ScanGrid) -> None:
    """Leading header row of axis2 values, leading column of axis1 values."""
    with _open_lf(path) as fh:
        corner = f"{grid.axis1_name}\\{grid.axis2_name}"
        fh.write(",".join([corner] + [repr(float(v)) for v in grid.axis2]) + "\n")
        for a1, row in zip(grid.axis1, grid.values):
            fh.write(",".join([repr(float(a1))] + [repr(float(v)) for v in row]) + "\n")


def write_scan_grid_json(path, grid: ScanGrid) -> None:
    doc = {
        "axis1_name": grid.axis1_name,
        "axis1": [float(v) for v in grid.axis1],
        "axis2_name": grid.axis2_name,
        "axis2": [float(v) for v in grid.axis2],
        "values": [[float(v) for v in row] for row in grid.values],
        "metadata": grid.metadata,
    }
    with _open_lf(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_robustness_json(path, report: RobustnessReport) -> None:
    doc = {
        "eta": report.eta,
        "epsilon": report.epsilon,
        "kappa": [float(v) for v in report.kappa],
        "lambda": [float(v) for v in report.lam],
        "magic": [{"kappa": float(k), "lambda": float(l)} for k, l in report.magic],
        "n_quad": report.n_quad,
    }
    with _open_lf(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_columns_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    """Generic column-oriented CSV with shortest-repr floats."""
    n = len(columns[0])
    with _open_lf(path) as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(repr(float(col[i])) for col in columns) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, command: str, config: dict, files: list[Path],
                   duration_s: float, version: str) -> None:
    base = Path(path).parent
    doc = {
        "command": command,
        "config": config,
        "version": version,
        "duration_s": duration_s,
        "files": [{"path": str(Path(f).relative_to(base)), "sha256": sha256_file(f)}
                  for f in files],
    }
    with _open_lf(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
