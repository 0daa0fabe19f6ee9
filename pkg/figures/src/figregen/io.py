"""Readers for the exported data files, with schema checks that name the file."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class FigureError(Exception):
    """Missing, malformed, or empty input; the message names the file."""


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FigureError(f"input file not found: {p}")
    return p


def read_series_csv(path, expected_header: list[str] | None = None
                    ) -> tuple[list[str], np.ndarray]:
    """Column-oriented CSV -> (header, values (n_rows, n_cols))."""
    p = _require_file(path)
    with open(p, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureError(f"empty data file: {p}")
    header = rows[0]
    if expected_header is not None and header[:len(expected_header)] != expected_header:
        raise FigureError(f"unexpected header in {p}: {header!r}")
    if len(rows) < 2:
        raise FigureError(f"no data rows in {p}")
    try:
        values = np.array([[float(x) for x in row] for row in rows[1:]])
    except ValueError as exc:
        raise FigureError(f"non-numeric data in {p}: {exc}") from exc
    if values.ndim != 2 or values.shape[1] != len(header):
        raise FigureError(f"ragged rows in {p}")
    return header, values


def read_grid_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scan-grid CSV -> (axis1 (m,), axis2 (n,), values (m, n)).

    Layout: corner label + axis2 values on the first row, axis1 value
    leading each data row.
    """
    p = _require_file(path)
    with open(p, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) < 2:
        raise FigureError(f"not a grid file: {p}")
    try:
        axis2 = np.array([float(x) for x in rows[0][1:]])
        axis1 = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise FigureError(f"non-numeric grid data in {p}: {exc}") from exc
    if values.shape != (axis1.size, axis2.size):
        raise FigureError(f"grid shape mismatch in {p}")
    return axis1, axis2, values


def read_robustness_json(path) -> dict:
    p = _require_file(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise FigureError(f"malformed JSON in {p}: {exc}") from exc
    for key in ("kappa", "lambda", "magic"):
        if key not in doc:
            raise FigureError(f"missing key {key!r} in {p}")
    if not doc["kappa"]:
        raise FigureError(f"empty robustness scan in {p}")
    return doc
