"""Text serialization: CSV with 17-significant-digit decimals plus JSON
sidecars. Everything is deterministic (sorted keys, no timestamps) so reruns
produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .evaluation import SweepRow
from .pscs import PscsMeasurement
from .solvers import ReconstructionResult

FLOAT_FMT = "%.17g"


def _fmt(value: float) -> str:
    return FLOAT_FMT % float(value)


def save_vector_csv(path, values, column: str = "value") -> None:
    values = np.asarray(values, dtype=np.float64)
    lines = [column]
    lines.extend(_fmt(v) for v in values)
    Path(path).write_text("\n".join(lines) + "\n")


def load_vector_csv(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    return np.array([float(line) for line in lines[1:]], dtype=np.float64)


def save_matrix_csv(path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {matrix.shape}")
    lines = [",".join(f"c{j}" for j in range(matrix.shape[1]))]
    lines.extend(",".join(_fmt(v) for v in row) for row in matrix)
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return np.array(rows, dtype=np.float64)


def save_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_trace_csv(path, result: ReconstructionResult) -> None:
    lines = ["iteration,objective,residual"]
    lines.extend(
        f"{i},{_fmt(obj)},{_fmt(res)}" for i, obj, res in result.trace_rows()
    )
    Path(path).write_text("\n".join(lines) + "\n")


def save_sweep_csv(path, rows: list[SweepRow]) -> None:
    lines = ["k,l,trials,success_rate,mean_snr_db,mean_iters"]
    lines.extend(
        f"{r.k},{r.l},{r.trials},{_fmt(r.success_rate)},"
        f"{_fmt(r.mean_snr_db)},{_fmt(r.mean_iters)}"
        for r in rows
    )
    Path(path).write_text("\n".join(lines) + "\n")


def save_pscs_csv(path, measurement: PscsMeasurement) -> None:
    lines = ["segment,finger,value"]
    fingers = measurement.bank.fingers_per_segment
    for i, v in enumerate(measurement.y_joint):
        lines.append(f"{i // fingers},{i % fingers},{_fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n")
