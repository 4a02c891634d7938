"""k-nearest-neighbour sparsity profiles and exact neighbour queries.

The distance from a sample point to its k-th nearest neighbour (self
excluded) scores how sparse the sample is around that point: large values
sit in low-density regions.  Two backends compute the same quantities, a
brute-force O(n^2) kernel and a kd-tree; ``backend="auto"`` switches to the
tree above ``BRUTE_FORCE_MAX`` points.  They agree on distances, and
downstream code consumes distance values only, so the backend switch never
changes results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .cloud import PointCloud

BRUTE_FORCE_MAX = 512


def _use_tree(backend: str, n: int) -> bool:
    if backend == "auto":
        return n > BRUTE_FORCE_MAX
    if backend == "tree":
        return True
    if backend == "brute":
        return False
    raise ValueError(f"backend must be 'auto', 'brute', or 'tree', got {backend!r}")


@dataclass(frozen=True, eq=False)
class SparsityProfile:
    """Per-point sparsity values g(x_i) for one sample."""

    values: np.ndarray
    k: int
    sample_ref: str | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("sparsity values must form a nonempty vector")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("sparsity values must be finite and nonnegative")
        vals = np.ascontiguousarray(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size


def default_neighbor_count(n: int) -> int:
    """Default k = max(2, ceil(sqrt(n))), clamped to the valid range [1, n-1]."""
    if n < 2:
        raise ValueError("need at least two points to pick a neighbour count")
    return min(n - 1, max(2, math.isqrt(n - 1) + 1))


def knn_sparsity(cloud: PointCloud, k: int | None = None, *, backend: str = "auto") -> SparsityProfile:
    """Distance from each sample point to its k-th nearest neighbour.

    Self-distances are excluded, so duplicated points get sparsity 0 for
    k = 1.  Requires 1 <= k <= n - 1; defaults to
    :func:`default_neighbor_count`.
    """
    pts = cloud.points
    n = pts.shape[0]
    if k is None:
        k = default_neighbor_count(n)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n-1 = {n - 1}, got {k}")
    values = kth_neighbor_distances(pts, k, backend=backend)
    return SparsityProfile(values, k=k, sample_ref=cloud.label)


def kth_neighbor_distances(points: np.ndarray, k: int, *, backend: str = "auto") -> np.ndarray:
    """k-th nearest-neighbour distance within ``points``, self excluded."""
    n = points.shape[0]
    if _use_tree(backend, n):
        # The (k+1)-th smallest distance including the self hit equals the
        # k-th smallest with self excluded.
        dist, _ = cKDTree(points).query(points, k=k + 1)
        return dist[:, k]
    d = cdist(points, points)
    np.fill_diagonal(d, np.inf)
    return np.partition(d, k - 1, axis=1)[:, k - 1]


def kth_cross_distances(
    points: np.ndarray, queries: np.ndarray, k: int, *, backend: str = "auto"
) -> np.ndarray:
    """For each query, the distance to its k-th nearest point in ``points``."""
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n = {n}, got {k}")
    if _use_tree(backend, n):
        dist, _ = cKDTree(points).query(queries, k=k)
        return dist[:, k - 1] if k > 1 else np.atleast_1d(dist)
    d = cdist(queries, points)
    return np.partition(d, k - 1, axis=1)[:, k - 1]


def knn_query(
    cloud: PointCloud,
    query,
    k: int,
    exclude_index: int | None = None,
    *,
    backend: str = "auto",
) -> tuple[np.ndarray, np.ndarray]:
    """The k nearest sample points to ``query`` in ascending distance order.

    Returns (indices, distances).  A self-match at distance 0 is included
    when the query coincides with a sample point, unless that point's index
    is passed as ``exclude_index``.  Exact ties are interchangeable; the
    brute-force backend breaks them by ascending index.
    """
    pts = cloud.points
    n = pts.shape[0]
    q = np.asarray(query, dtype=float).reshape(-1)
    if q.size != cloud.dim:
        raise ValueError(f"query has dimension {q.size}, cloud has {cloud.dim}")
    limit = n if exclude_index is None else n - 1
    if not 1 <= k <= limit:
        raise ValueError(f"k must satisfy 1 <= k <= {limit}, got {k}")
    if not _use_tree(backend, n):
        d = np.linalg.norm(pts - q, axis=1)
        if exclude_index is not None:
            d = d.copy()
            d[exclude_index] = np.inf
        order = np.argsort(d, kind="stable")[:k]
        return order, d[order]
    extra = k if exclude_index is None else k + 1
    dist, idx = cKDTree(pts).query(q, k=min(extra, n))
    dist = np.atleast_1d(dist)
    idx = np.atleast_1d(idx)
    if exclude_index is not None:
        keep = idx != exclude_index
        dist, idx = dist[keep], idx[keep]
    return idx[:k], dist[:k]
