"""Minimum-volume sets and nested level-set bands from a sparsity profile.

The estimator is an order statistic: sort the sample by sparsity and keep
the densest fraction.  At level nu the retained set holds the
ceil((1 - nu) * n) points with smallest sparsity, so its empirical mass is
1 - nu; consecutive levels carve the sample into disjoint nested bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .cloud import LevelGrid, PointCloud
from .sparsity import SparsityProfile, knn_sparsity


@dataclass(frozen=True, eq=False)
class LevelBand:
    """One band: member indices into the parent cloud, plus covering radius.

    ``radius`` is the ball radius of the band's covering estimate, set by
    :func:`covering_radius` (0 for fewer than two members).
    """

    index: int
    member_indices: np.ndarray
    radius: float
    count: int

    def __post_init__(self) -> None:
        idx = np.ascontiguousarray(np.asarray(self.member_indices, dtype=np.intp))
        idx.flags.writeable = False
        object.__setattr__(self, "member_indices", idx)
        if self.radius < 0:
            raise ValueError("band radius must be nonnegative")


@dataclass(frozen=True, eq=False)
class LevelSetModel:
    """Sparsity profile, grid, per-level thresholds, and band assignment.

    ``rho_stars[i]`` is the sparsity value cutting the retained set at level
    nu_i (the largest sparsity among retained points; 0 when nothing is
    retained).  Thresholds are non-increasing in i: less retained mass means
    a tighter sparsity cut.
    """

    profile: SparsityProfile
    grid: LevelGrid
    rho_stars: tuple[float, ...]
    band_assignment: np.ndarray
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        assign = np.ascontiguousarray(np.asarray(self.band_assignment, dtype=np.intp))
        assign.flags.writeable = False
        object.__setattr__(self, "band_assignment", assign)

    @property
    def k(self) -> int:
        return self.profile.k


def _retained_count(n: int, nu: float) -> int:
    """ceil((1 - nu) * n), evaluated as n - floor(nu * n) with a snap guard
    so grid values like 0.1 behave as exact tenths."""
    return n - int(math.floor(nu * n + 1e-9))


def minimum_volume_set(profile: SparsityProfile, nu: float) -> np.ndarray:
    """Indices of the ceil((1 - nu) * n) sample points with smallest sparsity.

    nu = 0 keeps every point, nu = 1 keeps none.  Ties at the threshold are
    included by ascending sample index until the count is met.
    """
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    n = profile.n
    count = _retained_count(n, nu)
    order = np.argsort(profile.values, kind="stable")
    return np.sort(order[:count])


def band_radius(cloud: PointCloud, member_indices) -> float:
    """Lower median of pairwise distances among band members; 0 if < 2 members."""
    idx = np.asarray(member_indices, dtype=np.intp)
    if idx.size < 2:
        return 0.0
    dists = np.sort(pdist(cloud.points[idx]))
    return float(dists[(dists.size - 1) // 2])


def covering_radius(cloud: PointCloud, member_indices) -> float:
    """Ball radius for a band's covering estimate.

    The pairwise-median radius, capped at the band's largest
    nearest-neighbour distance.  A band often splits into separated shells
    (the two flanks of a mode, say); the raw pairwise median then sits at
    the cross-shell scale and the covering swallows everything near the
    band, so the cap pins the radius to the band's own connectivity scale
    while leaving compact bands at their median radius.
    """
    idx = np.asarray(member_indices, dtype=np.intp)
    if idx.size < 2:
        return 0.0
    flat = pdist(cloud.points[idx])
    median = float(np.sort(flat)[(flat.size - 1) // 2])
    square = squareform(flat)
    np.fill_diagonal(square, np.inf)
    largest_gap = float(square.min(axis=1).max())
    return min(median, largest_gap)


def fit_bands(
    cloud: PointCloud, grid: LevelGrid | None = None, k: int | None = None
) -> tuple[LevelSetModel, list[LevelBand]]:
    """Estimate the nested level-set bands of a sample.

    Band i (1-based) holds the points retained at level nu_i but not at
    nu_{i+1}; band 1 is the sparsest shell and the last band the densest
    core.  Bands partition the sample; empty bands are permitted and kept.

    Returns the fitted model plus one LevelBand per grid interval.
    """
    if grid is None:
        grid = LevelGrid.uniform()
    profile = knn_sparsity(cloud, k)
    n = cloud.n
    order = np.argsort(profile.values, kind="stable")
    counts = [_retained_count(n, nu) for nu in grid.nu_values]
    g_sorted = profile.values[order]
    rho_stars = tuple(float(g_sorted[c - 1]) if c >= 1 else 0.0 for c in counts)

    assignment = np.empty(n, dtype=np.intp)
    bands: list[LevelBand] = []
    for i in range(grid.n_bands):
        members = order[counts[i + 1]: counts[i]]
        assignment[members] = i + 1
        members = np.sort(members)
        bands.append(
            LevelBand(
                index=i + 1,
                member_indices=members,
                radius=covering_radius(cloud, members),
                count=members.size,
            )
        )
    notes = ()
    if n < grid.n_bands:
        notes = (f"sample size {n} is below the band count {grid.n_bands}; some bands are empty",)
    model = LevelSetModel(profile, grid, rho_stars, assignment, notes)
    return model, bands


def model_to_dict(model: LevelSetModel, bands: list[LevelBand]) -> dict:
    """JSON-ready summary of a fitted model, for audit and golden tests."""
    return {
        "grid": list(model.grid.nu_values),
        "k": model.k,
        "rho_stars": list(model.rho_stars),
        "bands": [
            {"index": b.index, "count": b.count, "radius": b.radius} for b in bands
        ],
        "notes": list(model.notes),
    }
