"""Permutation-test engine, discrimination-threshold searches, and the
group-distance test.

Every randomized step is keyed by (seed, stream index), so replicates can
run on any number of workers and still reproduce bit-identically.
P-values follow the plain counting convention #[replicate >= observed] / N
with no smoothing, so p = 0 is possible and is displayed as "< 1/N".
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cloud import LevelGrid, as_point_array
from .distance import WeightScheme, distance_matrix
from .rng import RngSpec

Statistic = Callable[[np.ndarray, np.ndarray], float]


def _map_indexed(fn, count: int, threads: int | None) -> list:
    """Evaluate fn(0..count-1), optionally on a thread pool; output order is
    by index either way."""
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(i) for i in range(count)]


@dataclass(frozen=True, eq=False)
class PermutationReport:
    """Observed statistic, permutation replicates, and the counting p-value."""

    observed: float
    replicates: np.ndarray
    p_value: float
    n_permutations: int
    seed: RngSpec

    def __post_init__(self) -> None:
        reps = np.ascontiguousarray(np.asarray(self.replicates, dtype=float))
        reps.flags.writeable = False
        object.__setattr__(self, "replicates", reps)

    @property
    def p_display(self) -> str:
        if self.p_value == 0.0:
            return f"< {1.0 / self.n_permutations!r}"
        return repr(self.p_value)

    def to_dict(self) -> dict:
        return {
            "observed": self.observed,
            "p_value": self.p_value,
            "p_display": self.p_display,
            "n_permutations": self.n_permutations,
            "seed": {"seed": self.seed.seed, "stream_id": self.seed.stream_id},
            "replicates": [float(v) for v in self.replicates],
        }


def permutation_test(
    stat: Statistic,
    p,
    q,
    n_permutations: int = 1000,
    rng: RngSpec = RngSpec(0),
    threads: int | None = None,
) -> PermutationReport:
    """Two-sample permutation test for any statistic.

    Pools the n + m points and draws ``n_permutations`` uniformly random
    relabelings that preserve the group sizes (a full shuffle of the pooled
    index array per replicate, each on its own derived stream).
    """
    if n_permutations < 1:
        raise ValueError("need at least one permutation")
    x = as_point_array(p, "p")
    y = as_point_array(q, "q")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    n = x.shape[0]
    pooled = np.vstack([x, y])
    observed = float(stat(x, y))

    def one(i: int) -> float:
        perm = rng.child(i).generator().permutation(pooled.shape[0])
        return float(stat(pooled[perm[:n]], pooled[perm[n:]]))

    replicates = np.array(_map_indexed(one, n_permutations, threads))
    p_value = float(np.count_nonzero(replicates >= observed)) / n_permutations
    return PermutationReport(observed, replicates, p_value, n_permutations, rng)


@dataclass(frozen=True)
class GroupTestReport:
    """Within- and between-group average distances and their permutation test."""

    delta1: float
    delta2: float
    delta12: float
    delta_star: float
    permutation: PermutationReport

    def to_dict(self) -> dict:
        return {
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta12": self.delta12,
            "delta_star": self.delta_star,
            "permutation": self.permutation.to_dict(),
        }


def _group_deltas(matrix: np.ndarray, group1: np.ndarray, group2: np.ndarray) -> tuple[float, float, float, float]:
    g1, g2 = group1.size, group2.size
    within1 = float(matrix[np.ix_(group1, group1)].sum()) / (g1 * (g1 - 1))
    within2 = float(matrix[np.ix_(group2, group2)].sum()) / (g2 * (g2 - 1))
    between = float(matrix[np.ix_(group1, group2)].sum()) / (g1 * g2)
    return within1, within2, between, between - (within1 + within2) / 2.0


def group_test(
    clouds: Sequence,
    group_labels: Sequence,
    grid: LevelGrid | None = None,
    k: int | None = None,
    scheme: WeightScheme | str = WeightScheme.LS1,
    n_permutations: int = 1000,
    rng: RngSpec = RngSpec(0),
    threads: int | None = None,
    matrix: np.ndarray | None = None,
) -> GroupTestReport:
    """Between-group distance test over subject-level samples.

    Each cloud is one subject's sample.  The full pairwise level-set
    distance matrix is computed once; permutation replicates relabel
    subjects (never points) uniformly among group-size-preserving
    assignments and reuse the cached matrix.
    """
    labels = list(group_labels)
    if len(labels) != len(clouds):
        raise ValueError("one label per cloud required")
    uniques = sorted(set(labels), key=str)
    if len(uniques) != 2:
        raise ValueError(f"exactly two groups required, got {len(uniques)}")
    group1 = np.array([i for i, v in enumerate(labels) if v == uniques[0]])
    group2 = np.array([i for i, v in enumerate(labels) if v == uniques[1]])
    if group1.size < 2 or group2.size < 2:
        raise ValueError("each group needs at least two subjects")
    if matrix is None:
        matrix = distance_matrix(clouds, grid, k, scheme, threads)
    total = len(labels)

    delta1, delta2, delta12, delta_star = _group_deltas(matrix, group1, group2)

    def one(i: int) -> float:
        perm = rng.child(i).generator().permutation(total)
        return _group_deltas(matrix, perm[: group1.size], perm[group1.size:])[3]

    replicates = np.array(_map_indexed(one, n_permutations, threads))
    p_value = float(np.count_nonzero(replicates >= delta_star)) / n_permutations
    report = PermutationReport(delta_star, replicates, p_value, n_permutations, rng)
    return GroupTestReport(delta1, delta2, delta12, delta_star, report)


@dataclass(frozen=True)
class ThresholdSearchReport:
    """Result of one discrimination-threshold search.

    ``threshold`` is the smallest tried grid value whose estimated power
    reached the target (None when the grid was exhausted);
    ``reported_value`` rescales it to the benchmark convention:
    threshold * sqrt(d) in mean-shift mode, 1 + threshold in variance mode.
    """

    metric: str
    dimension: int
    mode: str
    grid_values: tuple[float, ...]
    powers: tuple[float, ...]
    h0_percentile: float
    threshold: float | None
    reported_value: float | None
    params: dict
    seed: RngSpec

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "dimension": self.dimension,
            "mode": self.mode,
            "grid_values": list(self.grid_values),
            "powers": list(self.powers),
            "h0_percentile": self.h0_percentile,
            "threshold": self.threshold,
            "reported_value": self.reported_value,
            "params": dict(self.params),
            "seed": {"seed": self.seed.seed, "stream_id": self.seed.stream_id},
        }


def threshold_search(
    metric: Statistic,
    d: int,
    mode: str,
    rng: RngSpec = RngSpec(0),
    *,
    metric_name: str = "metric",
    reference_reps: int = 1000,
    power_reps: int = 1000,
    percentile: float = 95.0,
    power_target: float = 0.90,
    step: float | None = None,
    grid_max: float | None = None,
    sample_factor: int = 100,
    redraw_reference: bool = False,
    threads: int | None = None,
) -> ThresholdSearchReport:
    """Smallest separation at which a metric discriminates two normals.

    Protocol: draw one reference sample of size ``sample_factor * d`` from
    N(0, I_d); estimate the null percentile of metric(fresh null sample,
    reference) over ``reference_reps`` draws; then walk an ascending
    separation grid (mean shift delta, or variance expansion sigma) and at
    each value estimate power as the fraction of ``power_reps`` alternative
    samples whose distance to the reference exceeds that percentile.  Stop
    at the first grid value with power >= ``power_target``.

    ``redraw_reference`` redraws the reference for every replicate instead
    of fixing one for the whole protocol.
    """
    if mode not in ("mean-shift", "variance"):
        raise ValueError(f"mode must be 'mean-shift' or 'variance', got {mode!r}")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if step is None:
        step = 0.05 / math.sqrt(d) if mode == "mean-shift" else 0.05
    step = float(step)
    if grid_max is None:
        grid_max = 2.0 / math.sqrt(d) if mode == "mean-shift" else 2.0
    grid_max = float(grid_max)
    n = sample_factor * d
    reference = rng.child(0).generator().standard_normal((n, d))

    def null_distance(i: int) -> float:
        base = rng.child(1 + i)
        sample = base.child(0).generator().standard_normal((n, d))
        ref = base.child(1).generator().standard_normal((n, d)) if redraw_reference else reference
        return float(metric(sample, ref))

    null_distances = _map_indexed(null_distance, reference_reps, threads)
    h0_percentile = float(np.percentile(null_distances, percentile))

    grid_values: list[float] = []
    powers: list[float] = []
    threshold = None
    n_steps = int(np.floor(grid_max / step + 1e-9)) + 1
    for gi in range(n_steps):
        value = gi * step

        def alt_distance(j: int, _gi=gi, _value=value) -> float:
            base = rng.child(1 + reference_reps + _gi * power_reps + j)
            sample = base.child(0).generator().standard_normal((n, d))
            ref = base.child(1).generator().standard_normal((n, d)) if redraw_reference else reference
            if mode == "mean-shift":
                sample = sample + _value
            else:
                sample = sample * np.sqrt(1.0 + _value)
            return float(metric(sample, ref))

        alt = _map_indexed(alt_distance, power_reps, threads)
        power = float(np.count_nonzero(np.asarray(alt) > h0_percentile)) / power_reps
        grid_values.append(value)
        powers.append(power)
        if power >= power_target:
            threshold = value
            break

    if threshold is None:
        reported = None
    elif mode == "mean-shift":
        reported = threshold * math.sqrt(d)
    else:
        reported = 1.0 + threshold
    params = {
        "reference_reps": reference_reps,
        "power_reps": power_reps,
        "percentile": percentile,
        "power_target": power_target,
        "step": step,
        "grid_max": grid_max,
        "sample_factor": sample_factor,
        "redraw_reference": redraw_reference,
    }
    return ThresholdSearchReport(
        metric=metric_name,
        dimension=d,
        mode=mode,
        grid_values=tuple(grid_values),
        powers=tuple(powers),
        h0_percentile=h0_percentile,
        threshold=threshold,
        reported_value=reported,
        params=params,
        seed=rng,
    )
