"""Synthetic sample generators for the three benchmark families.

Families: isotropic normal N(mean, var * I_d), a one-dimensional
normal/uniform mixture, and a gamma distribution.  Generation is a pure
function of (spec, RngSpec).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .rng import RngSpec


@dataclass(frozen=True)
class Normal:
    """N(mean, var * I_d); ``mean`` may be a scalar or a d-vector."""

    mean: float | tuple[float, ...]
    var: float = 1.0

    def __post_init__(self) -> None:
        if self.var <= 0:
            raise ValueError("var must be positive")
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        if mean.ndim != 1 or mean.size < 1 or not np.all(np.isfinite(mean)):
            raise ValueError("mean must be a finite scalar or vector")
        object.__setattr__(self, "mean", tuple(float(v) for v in mean))

    @property
    def dim(self) -> int:
        return len(self.mean)


@dataclass(frozen=True)
class NormalUniformMixture:
    """weight * N(mu, sigma^2) + (1 - weight) * U(low, high), on the real line."""

    weight: float
    mu: float
    sigma: float
    low: float
    high: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("mixture weight must lie in [0, 1]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not self.low < self.high:
            raise ValueError("uniform bounds must satisfy low < high")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Gamma:
    """Gamma(shape, scale) on the positive half-line."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("shape and scale must be positive")

    @property
    def dim(self) -> int:
        return 1


Family = Normal | NormalUniformMixture | Gamma


@dataclass(frozen=True)
class SyntheticSpec:
    """A distribution family plus a sample size."""

    family: Family
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.family, (Normal, NormalUniformMixture, Gamma)):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("sample size must be at least 1")


def generate(spec: SyntheticSpec, rng: RngSpec) -> PointCloud:
    """Draw spec.n i.i.d. points from spec.family; deterministic given rng."""
    g = rng.generator()
    fam = spec.family
    n = spec.n
    if isinstance(fam, Normal):
        mean = np.asarray(fam.mean, dtype=float)
        pts = g.normal(0.0, 1.0, size=(n, mean.size)) * np.sqrt(fam.var) + mean
        label = "normal"
    elif isinstance(fam, NormalUniformMixture):
        # Draw both components for every point, then select: keeps the draw
        # count (and hence the output) independent of the component mask.
        from_normal = g.random(n) < fam.weight
        normal_part = g.normal(fam.mu, fam.sigma, size=n)
        uniform_part = g.uniform(fam.low, fam.high, size=n)
        pts = np.where(from_normal, normal_part, uniform_part).reshape(n, 1)
        label = "normal-uniform-mixture"
    else:
        pts = g.gamma(fam.shape, fam.scale, size=n).reshape(n, 1)
        label = "gamma"
    return PointCloud(pts, label=label)
