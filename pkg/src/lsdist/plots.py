"""Figure rendering for the CLI report paths.

Every report-producing command writes a PNG next to its delimited output.
Rendering uses the Agg backend with fixed metadata so figures are
byte-reproducible for identical inputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_METADATA = {"Software": "lsdist"}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=110, metadata=_METADATA)
    plt.close(fig)


def save_power_curves(path, searches: dict, title: str) -> None:
    """Power versus separation, one line per metric, with the target level."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    target = None
    for name, report in sorted(searches.items()):
        ax.plot(report.grid_values, report.powers, marker="o", markersize=3, label=name)
        target = report.params["power_target"]
    if target is not None:
        ax.axhline(target, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("separation")
    ax.set_ylabel("estimated power")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_pvalue_bars(path, pvalues: dict, title: str) -> None:
    """Permutation p-values per metric with the 0.05 reference line."""
    names = list(pvalues)
    values = [pvalues[n] for n in names]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(range(len(names)), values, color="steelblue")
    ax.axhline(0.05, color="firebrick", linestyle="--", linewidth=1)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("permutation p-value")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def save_replicate_histogram(path, report, title: str) -> None:
    """Permutation replicate distribution with the observed statistic marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(report.replicates, bins=40, color="steelblue", alpha=0.8)
    ax.axvline(report.observed, color="firebrick", linewidth=1.5, label="observed")
    ax.set_xlabel("statistic")
    ax.set_ylabel("replicates")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_embedding_scatter(path, ids: list[str], coordinates, title: str) -> None:
    """2-d embedding scatter with object labels."""
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    xs = [c[0] for c in coordinates]
    ys = [c[1] if len(c) > 1 else 0.0 for c in coordinates]
    ax.scatter(xs, ys, s=24, color="steelblue")
    for label, x, y in zip(ids, xs, ys):
        ax.annotate(label, (x, y), fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.set_xlabel("coordinate 1")
    ax.set_ylabel("coordinate 2")
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    _save(fig, path)
