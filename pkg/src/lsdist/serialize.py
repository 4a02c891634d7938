"""Canonical JSON and CSV writers.

JSON uses sorted keys, two-space indentation, and shortest round-trip float
formatting, so identical inputs always serialize to identical bytes.  CSV
floats are written with repr(), which round-trips exactly.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path

import numpy as np


def to_jsonable(obj):
    """Recursively convert reports, arrays, and numpy scalars to JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8", newline="\n")


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_matrix_csv(path, ids: list[str], matrix: np.ndarray) -> None:
    """Square matrix with id row and column labels."""
    header = ["id"] + list(ids)
    rows = [[ids[i]] + [float(v) for v in matrix[i]] for i in range(len(ids))]
    write_rows_csv(path, header, rows)
