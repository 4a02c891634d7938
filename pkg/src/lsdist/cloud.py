"""Point clouds, level grids, and the CSV interchange format.

A point cloud is the sample representation of a probability measure:
n points in R^d plus an optional provenance label.  Clouds are immutable
after construction and safe to share across threads.

CSV format: UTF-8, header row ``x1,...,xd``, one point per row, decimal
floats, LF line endings.  Floats are written with shortest round-trip
precision, so write-then-read reproduces coordinates exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputFormatError


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points in R^d with an optional label."""

    points: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValueError(f"points must be an (n, d) array, got shape {pts.shape}")
        n, d = pts.shape
        if n < 1:
            raise ValueError("a point cloud needs at least one point")
        if d < 1:
            raise ValueError("point dimension must be at least 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts = np.ascontiguousarray(pts)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def as_point_array(obj, name: str = "sample") -> np.ndarray:
    """Coerce a PointCloud or array-like to an (n, d) float array."""
    if isinstance(obj, PointCloud):
        return obj.points
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be an (n, d) array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class LevelGrid:
    """Strictly increasing mass levels nu_1 = 0 < ... < nu_m = 1.

    The m grid values induce m - 1 nested bands; retained mass at level nu
    is 1 - nu (densest part of the sample).
    """

    nu_values: tuple[float, ...]

    def __post_init__(self) -> None:
        nu = tuple(float(v) for v in self.nu_values)
        if len(nu) < 2:
            raise ValueError("a level grid needs at least two values")
        if nu[0] != 0.0 or nu[-1] != 1.0:
            raise ValueError("level grid endpoints must be 0 and 1")
        if any(b <= a for a, b in zip(nu, nu[1:])):
            raise ValueError("level grid values must be strictly increasing")
        object.__setattr__(self, "nu_values", nu)

    @classmethod
    def uniform(cls, bands: int = 10) -> "LevelGrid":
        """Uniform grid with the given number of bands (m = bands + 1 values)."""
        if bands < 1:
            raise ValueError("need at least one band")
        return cls(tuple(i / bands for i in range(bands + 1)))

    @property
    def m(self) -> int:
        return len(self.nu_values)

    @property
    def n_bands(self) -> int:
        return len(self.nu_values) - 1


def read_csv(path) -> PointCloud:
    """Read a point cloud from CSV (header row required).

    Raises InputFormatError naming the offending row for ragged rows,
    non-numeric cells, or an empty file.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InputFormatError(f"{path}: empty file")
    header = lines[0].split(",")
    d = len(header)
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "":
            raise InputFormatError(f"{path}: row {lineno}: blank row")
        cells = line.split(",")
        if len(cells) != d:
            raise InputFormatError(
                f"{path}: row {lineno}: expected {d} columns, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            raise InputFormatError(
                f"{path}: row {lineno}: non-numeric value {bad!r}"
            ) from None
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputFormatError(f"{path}: non-finite coordinate")
    return PointCloud(arr, label=path.stem)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_csv(cloud: PointCloud, path) -> None:
    """Write a point cloud as CSV with header ``x1,...,xd`` and LF endings."""
    path = Path(path)
    lines = [",".join(f"x{j + 1}" for j in range(cloud.dim))]
    for row in cloud.points:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
