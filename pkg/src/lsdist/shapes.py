"""Shape pipeline: grayscale image -> point cloud -> embedding.

Images are PGM files (ASCII P2 or binary P5), intensities normalized to
[0, 1] by the file's maxval.  A shape becomes a point cloud by sampling
uniform positions over the image rectangle, keeping those that land on
bright pixels, then centering at the centroid and rescaling the
root-mean-square radius to 1.

Distance matrices embed into Euclidean coordinates with classical
(Torgerson) multidimensional scaling on top of a cyclic Jacobi
eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cloud import PointCloud
from .errors import InputFormatError
from .rng import RngSpec


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major intensity raster with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must form a nonempty 2-d raster")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def read_pgm(path) -> GrayImage:
    """Read a P2 (ASCII) or P5 (binary) PGM file, maxval-normalized."""
    path = Path(path)
    data = path.read_bytes()
    tokens: list[bytes] = []
    pos = 0
    # Header: magic, width, height, maxval; '#' starts a comment line.
    while len(tokens) < 4 and pos < len(data):
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if pos > start:
            tokens.append(data[start:pos])
    if len(tokens) < 4:
        raise InputFormatError(f"{path}: truncated PGM header")
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise InputFormatError(f"{path}: non-numeric PGM header field") from None
    if width < 1 or height < 1 or maxval < 1 or maxval > 65535:
        raise InputFormatError(f"{path}: invalid PGM dimensions or maxval")
    count = width * height
    if magic == b"P2":
        try:
            values = np.array(data[pos:].split(), dtype=int)
        except ValueError:
            raise InputFormatError(f"{path}: non-numeric pixel value") from None
        if values.size != count:
            raise InputFormatError(f"{path}: expected {count} pixels, got {values.size}")
    elif magic == b"P5":
        pos += 1  # single whitespace after maxval
        raw = data[pos:]
        if maxval < 256:
            if len(raw) < count:
                raise InputFormatError(f"{path}: truncated P5 pixel data")
            values = np.frombuffer(raw[:count], dtype=np.uint8).astype(int)
        else:
            if len(raw) < 2 * count:
                raise InputFormatError(f"{path}: truncated P5 pixel data")
            values = np.frombuffer(raw[: 2 * count], dtype=">u2").astype(int)
    else:
        raise InputFormatError(f"{path}: unsupported magic {magic!r}, need P2 or P5")
    if values.min() < 0 or values.max() > maxval:
        raise InputFormatError(f"{path}: pixel value outside [0, maxval]")
    return GrayImage(values.reshape(height, width) / maxval)


def write_pgm(img: GrayImage, path, maxval: int = 255) -> None:
    """Write an image as ASCII P2 (used mainly to build test fixtures)."""
    path = Path(path)
    values = np.rint(img.pixels * maxval).astype(int)
    lines = ["P2", f"{img.width} {img.height}", f"{maxval}"]
    lines.extend(" ".join(str(v) for v in row) for row in values)
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def image_to_cloud(img: GrayImage, threshold: float = 0.99, rng: RngSpec = RngSpec(0)) -> PointCloud:
    """Sample a normalized point cloud from the bright region of an image.

    Draws width*height uniform positions over the image rectangle, keeps a
    position iff its containing pixel is brighter than ``threshold``, then
    centers the kept points at their centroid and rescales so the
    root-mean-square distance to the centroid is 1.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")
    h, w = img.height, img.width
    g = rng.generator()
    positions = g.random((h * w, 2)) * (w, h)
    cols = np.minimum(positions[:, 0].astype(int), w - 1)
    rows = np.minimum(positions[:, 1].astype(int), h - 1)
    keep = img.pixels[rows, cols] > threshold
    pts = positions[keep]
    if pts.shape[0] == 0:
        raise ValueError(f"blank mask at threshold {threshold}")
    # y grows downward in raster order; flip for natural orientation.
    pts = np.column_stack([pts[:, 0], h - pts[:, 1]])
    pts = pts - pts.mean(axis=0)
    rms = float(np.sqrt((pts ** 2).sum(axis=1).mean()))
    if rms > 0:
        pts = pts / rms
    return PointCloud(pts)


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps rotate away each off-diagonal entry in turn until the
    off-diagonal Frobenius norm falls below tol * max(1, ||A||_F).
    Returns (eigenvalues, eigenvectors) in descending eigenvalue order,
    eigenvectors as columns.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = max(1.0, float(np.linalg.norm(a)))

    def off_norm() -> float:
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.linalg.norm(off))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 * scale:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta^2 would overflow; use the asymptotic root.
                    t = 1.0 / (2.0 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                # Correction-term form of the rotation: diagonals move by
                # exactly t * apq and off entries combine as small updates,
                # which keeps the accumulated matrix close to the true
                # conjugation.
                h = t * apq
                a[p, p] -= h
                a[q, q] += h
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    g_val = a[r, p]
                    h_val = a[r, q]
                    a[r, p] = g_val - s * (h_val + g_val * tau)
                    a[r, q] = h_val + s * (g_val - h_val * tau)
                    a[p, r] = a[r, p]
                    a[q, r] = a[r, q]
                g_col = v[:, p].copy()
                h_col = v[:, q].copy()
                v[:, p] = g_col - s * (h_col + g_col * tau)
                v[:, q] = h_col + s * (g_col - h_col * tau)
    order = np.argsort(a.diagonal())[::-1]
    return a.diagonal()[order].copy(), v[:, order]


@dataclass(frozen=True, eq=False)
class EmbeddingResult:
    """Coordinates, eigenvalues (descending), and the negative-eigenvalue
    share of the spectrum as a residual stress measure."""

    coordinates: np.ndarray
    eigenvalues: np.ndarray
    stress: float


def classical_mds(matrix: np.ndarray, p: int = 2) -> EmbeddingResult:
    """Classical (Torgerson) MDS of a distance matrix.

    Double-centers the squared distances, eigendecomposes with the Jacobi
    solver, and returns the top-p coordinates scaled by sqrt(max(lambda, 0)).
    Exact for matrices of Euclidean distances.
    """
    d = np.asarray(matrix, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape != (n, n):
        raise ValueError("distance matrix must be square")
    if n < p + 1:
        raise ValueError(f"need at least p + 1 = {p + 1} objects, got {n}")
    if np.abs(d - d.T).max() > 1e-9:
        raise ValueError("distance matrix must be symmetric")
    if np.abs(d.diagonal()).max() > 1e-9:
        raise ValueError("distance matrix must have a zero diagonal")
    center = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * center @ (d * d) @ center
    b = (b + b.T) / 2.0
    eigenvalues, eigenvectors = jacobi_eigh(b)
    coords = eigenvectors[:, :p] * np.sqrt(np.maximum(eigenvalues[:p], 0.0))
    total = float(np.abs(eigenvalues).sum())
    negative = float(np.abs(eigenvalues[eigenvalues < 0]).sum())
    stress = negative / total if total > 0 else 0.0
    return EmbeddingResult(coordinates=coords, eigenvalues=eigenvalues, stress=stress)
