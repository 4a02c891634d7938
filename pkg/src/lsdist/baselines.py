"""Competitor two-sample statistics: k-NN Kullback-Leibler estimate,
Hotelling T^2, Energy distance, MMD, and the classical one-dimensional test
statistics (Kolmogorov-Smirnov, chi-square, Wilcoxon rank-sum).

All functions accept PointClouds or (n, d) arrays.  P-values come from the
permutation engine, not parametric null distributions, so each function
returns the raw statistic only.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.stats import rankdata

from .cloud import as_point_array
from .errors import DegeneracyWarning
from .sparsity import kth_cross_distances, kth_neighbor_distances

_EPS = 1e-12


def kl_knn(p, q, k: int = 10) -> float:
    """k-NN estimate of KL(P || Q) from two samples.

    KL = (d/n) * sum_i log(s_k(x_i) / r_k(x_i)) + log(m / (n - 1)), with
    r_k the k-NN distance of x_i within P (self excluded) and s_k its k-NN
    distance in Q.  Clamped below at 0 for reporting; zero neighbour
    distances are floored at 1e-12 with a degeneracy warning.
    """
    x = as_point_array(p, "p")
    y = as_point_array(q, "q")
    n, d = x.shape
    m = y.shape[0]
    if y.shape[1] != d:
        raise ValueError(f"dimension mismatch: {d} vs {y.shape[1]}")
    if not (1 <= k <= n - 1 and k <= m):
        raise ValueError(f"k = {k} too large for sample sizes n = {n}, m = {m}")
    r = kth_neighbor_distances(x, k)
    s = kth_cross_distances(y, x, k)
    if np.any(r <= 0) or np.any(s <= 0):
        warnings.warn("zero neighbour distance floored at 1e-12", DegeneracyWarning, stacklevel=2)
        r = np.maximum(r, _EPS)
        s = np.maximum(s, _EPS)
    value = (d / n) * np.sum(np.log(s / r)) + np.log(m / (n - 1))
    return max(float(value), 0.0)


def energy_distance(p, q) -> float:
    """Energy distance 2 E||X - Y|| - E||X - X'|| - E||Y - Y'|| (V-statistic,
    all ordered pairs including self in the within terms)."""
    x = as_point_array(p, "p")
    y = as_point_array(q, "q")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    n, m = x.shape[0], y.shape[0]
    cross = cdist(x, y).sum() / (n * m)
    within_x = 2.0 * pdist(x).sum() / (n * n) if n > 1 else 0.0
    within_y = 2.0 * pdist(y).sum() / (m * m) if m > 1 else 0.0
    return 2.0 * cross - within_x - within_y


def median_heuristic_bandwidth(p, q) -> float:
    """Median of the pooled pairwise distances of both samples."""
    pooled = np.vstack([as_point_array(p, "p"), as_point_array(q, "q")])
    if pooled.shape[0] < 2:
        return 0.0
    return float(np.median(pdist(pooled)))


def mmd(p, q, bandwidth: float | str = "median") -> float:
    """Squared maximum mean discrepancy with a Gaussian kernel
    exp(-||x - y||^2 / (2 h^2)), biased V-statistic, clamped at 0.

    ``bandwidth`` is a positive float or "median" for the pooled median
    heuristic; an all-identical pool gives h = 0, floored at 1e-12 with a
    degeneracy warning.
    """
    x = as_point_array(p, "p")
    y = as_point_array(q, "q")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if bandwidth == "median":
        h = median_heuristic_bandwidth(x, y)
    else:
        h = float(bandwidth)
        if h <= 0:
            raise ValueError("bandwidth must be positive")
    if h <= 0:
        warnings.warn("zero kernel bandwidth floored at 1e-12", DegeneracyWarning, stacklevel=2)
        h = _EPS
    gamma = 1.0 / (2.0 * h * h)

    def kernel_mean(a, b):
        return np.exp(-gamma * cdist(a, b, "sqeuclidean")).mean()

    value = kernel_mean(x, x) + kernel_mean(y, y) - 2.0 * kernel_mean(x, y)
    return max(float(value), 0.0)


def hotelling_t2(p, q) -> float:
    """Two-sample Hotelling statistic (nm/(n+m)) * diff' S_pooled^-1 * diff.

    Reduces to the squared pooled-variance t statistic in one dimension.
    A singular pooled covariance gets a ridge of 1e-8 * trace/d on the
    diagonal, with a degeneracy warning.
    """
    x = as_point_array(p, "p")
    y = as_point_array(q, "q")
    d = x.shape[1]
    if y.shape[1] != d:
        raise ValueError(f"dimension mismatch: {d} vs {y.shape[1]}")
    n, m = x.shape[0], y.shape[0]
    if n + m - 2 <= d:
        raise ValueError(f"need n + m - 2 > d, got n = {n}, m = {m}, d = {d}")
    diff = x.mean(axis=0) - y.mean(axis=0)
    cov_x = np.cov(x, rowvar=False).reshape(d, d) if n > 1 else np.zeros((d, d))
    cov_y = np.cov(y, rowvar=False).reshape(d, d) if m > 1 else np.zeros((d, d))
    pooled = ((n - 1) * cov_x + (m - 1) * cov_y) / (n + m - 2)
    try:
        solved = np.linalg.solve(pooled, diff)
    except np.linalg.LinAlgError:
        solved = None
    if solved is None or not np.all(np.isfinite(solved)):
        warnings.warn("singular pooled covariance, ridge added", DegeneracyWarning, stacklevel=2)
        ridge = 1e-8 * max(np.trace(pooled) / d, _EPS)
        solved = np.linalg.solve(pooled + ridge * np.eye(d), diff)
    return float((n * m / (n + m)) * diff @ solved)


def _require_1d(arr: np.ndarray, which: str) -> np.ndarray:
    if arr.shape[1] != 1:
        raise ValueError(f"{which} requires one-dimensional samples, got d = {arr.shape[1]}")
    return arr.ravel()


def ks_stat(p, q) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_t |F_P(t) - F_Q(t)|,
    evaluated at the pooled order statistics (1-d only)."""
    x = np.sort(_require_1d(as_point_array(p, "p"), "ks_stat"))
    y = np.sort(_require_1d(as_point_array(q, "q"), "ks_stat"))
    grid = np.concatenate([x, y])
    f_x = np.searchsorted(x, grid, side="right") / x.size
    f_y = np.searchsorted(y, grid, side="right") / y.size
    return float(np.abs(f_x - f_y).max())


def chi2_stat(p, q, bins: int = 5) -> float:
    """Homogeneity chi-square over equal-probability bins of the pooled
    sample: sum over bins and groups of (observed - expected)^2 / expected."""
    if bins < 2:
        raise ValueError("need at least 2 bins")
    x = _require_1d(as_point_array(p, "p"), "chi2_stat")
    y = _require_1d(as_point_array(q, "q"), "chi2_stat")
    pooled = np.concatenate([x, y])
    edges = np.quantile(pooled, np.arange(1, bins) / bins)
    obs_x = np.bincount(np.searchsorted(edges, x, side="right"), minlength=bins).astype(float)
    obs_y = np.bincount(np.searchsorted(edges, y, side="right"), minlength=bins).astype(float)
    totals = obs_x + obs_y
    frac_x = x.size / pooled.size
    total = 0.0
    for t, o_x, o_y in zip(totals, obs_x, obs_y):
        if t == 0:
            continue
        e_x = t * frac_x
        e_y = t - e_x
        total += (o_x - e_x) ** 2 / e_x + (o_y - e_y) ** 2 / e_y
    return float(total)


def wilcoxon_stat(p, q) -> float:
    """Rank sum of the first sample in the pooled midrank ordering (1-d only)."""
    x = _require_1d(as_point_array(p, "p"), "wilcoxon_stat")
    y = _require_1d(as_point_array(q, "q"), "wilcoxon_stat")
    ranks = rankdata(np.concatenate([x, y]), method="average")
    return float(ranks[: x.size].sum())
