"""Artifact writers: diagnostics CSV, snapshot CSV, JSON metadata."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..diagnostics import CSV_COLUMNS, DiagnosticsSample
from ..spectral import RealField


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips the float; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def write_diagnostics_csv(path: Path, samples: Iterable[DiagnosticsSample]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in samples:
            w.writerow([fmt(v) for v in s.row()])


def read_diagnostics_csv(path: Path) -> list[DiagnosticsSample]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [DiagnosticsSample(**{k: float(r[k]) for k in CSV_COLUMNS}) for r in rows]


def snapshot_name(t: float) -> str:
    return f"snap_t{t:.6g}.csv"


def write_snapshot(directory: Path, t: float, field: RealField) -> Path:
    path = directory / snapshot_name(t)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "U"))
        for x, u in zip(field.grid.x, field.values):
            w.writerow((fmt(x), fmt(u)))
    return path


def read_snapshot(path: Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data[:, 0], data[:, 1]


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
