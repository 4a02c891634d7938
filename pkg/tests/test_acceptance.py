"""Acceptance suite: one test per release gate, each printing a PASS/FAIL
line with its measured values.

Several gates are stochastic reproductions of benchmark experiments at desk
scale; their tolerances are fixed here and the random seeds are part of the
test definitions.
"""

import json
import math
import time
from functools import partial
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

import lsdist
from lsdist import (
    Gamma,
    LevelGrid,
    Normal,
    NormalUniformMixture,
    PointCloud,
    RngSpec,
    SyntheticSpec,
    WeightScheme,
    classical_mds,
    energy_distance,
    generate,
    hotelling_t2,
    kl_knn,
    ls_distance,
    mmd,
    permutation_test,
    threshold_search,
    write_csv,
)
from lsdist.baselines import chi2_stat, ks_stat, wilcoxon_stat
from lsdist.cli import main as cli_main
from lsdist.levelsets import fit_bands
from lsdist.setops import hausdorff, overlap
from lsdist.shapes import jacobi_eigh
from lsdist.sparsity import kth_neighbor_distances

from conftest import record_acceptance

SCHEMES = list(WeightScheme)


def _report(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number}: {status} - {detail}"
    print(line)
    record_acceptance(line)
    assert passed, line


def _ls_stat(scheme, grid, k):
    def f(a, b):
        return ls_distance(a, b, grid, k, scheme).total

    return f


def test_acceptance_01_identity_and_symmetry():
    start = time.time()
    rng = RngSpec(101)
    failures = []
    for trial in range(100):
        g = rng.child(trial).generator()
        d = int(g.choice([1, 2, 5]))
        n = int(g.integers(50, 501))
        pts = g.standard_normal((n, d)) * float(g.uniform(0.5, 2.0))
        cloud = PointCloud(pts)
        other = PointCloud(g.standard_normal((int(g.integers(50, 501)), d)) + g.uniform(-1, 1))
        for scheme in SCHEMES:
            identity = ls_distance(cloud, cloud, scheme=scheme).total
            ab = ls_distance(cloud, other, scheme=scheme).total
            ba = ls_distance(other, cloud, scheme=scheme).total
            if identity != 0.0:
                failures.append(f"identity {scheme.value} trial {trial}: {identity}")
            if ab != ba:
                failures.append(f"symmetry {scheme.value} trial {trial}: {ab} vs {ba}")
    elapsed = time.time() - start
    _report(
        1,
        not failures and elapsed < 60,
        f"identity/symmetry over 100 clouds x 4 schemes, {len(failures)} failures, {elapsed:.1f}s",
    )


def test_acceptance_02_similarity_transforms():
    start = time.time()
    rng = RngSpec(202)
    worst_rigid = 0.0
    worst_scale = 0.0
    for trial in range(12):
        g = rng.child(trial).generator()
        d = int(g.choice([1, 2, 5]))
        n = int(g.integers(50, 200))
        p = PointCloud(g.standard_normal((n, d)))
        q = PointCloud(g.standard_normal((n, d)) + g.uniform(-0.5, 1.5))
        m = g.standard_normal((d, d))
        rot, _ = np.linalg.qr(m)
        shift = g.standard_normal(d) * 4.0

        def moved(cloud, scale):
            return PointCloud(cloud.points @ rot.T * scale + shift)

        for scheme in SCHEMES:
            base = ls_distance(p, q, scheme=scheme).total
            rigid = ls_distance(moved(p, 1.0), moved(q, 1.0), scheme=scheme).total
            worst_rigid = max(worst_rigid, abs(rigid - base) / max(abs(base), 1e-30))
            for scale in (0.5, 3.0):
                scaled = ls_distance(moved(p, scale), moved(q, scale), scheme=scheme).total
                expect = base if scheme is WeightScheme.LS0 else scale * base
                worst_scale = max(worst_scale, abs(scaled - expect) / max(abs(expect), 1e-30))
    elapsed = time.time() - start
    _report(
        2,
        worst_rigid < 1e-9 and worst_scale < 1e-9 and elapsed < 60,
        f"rigid rel err {worst_rigid:.2e}, scaling rel err {worst_scale:.2e}, {elapsed:.1f}s",
    )


def test_acceptance_03_oracle_equivalence():
    start = time.time()
    rng = RngSpec(303)
    worst = 0.0
    mismatches = 0
    for trial in range(100):
        g = rng.child(trial).generator()
        n = int(g.integers(20, 301))
        m = int(g.integers(20, 301))
        d = int(g.choice([1, 2, 5]))
        a = g.standard_normal((n, d))
        b = g.standard_normal((m, d)) + g.uniform(-0.5, 0.5)
        k = int(g.integers(1, min(10, n - 1) + 1))

        knn_brute = kth_neighbor_distances(a, k, backend="brute")
        knn_tree = kth_neighbor_distances(a, k, backend="tree")
        worst = max(worst, float(np.abs(knn_brute - knn_tree).max()))

        r_a, r_b = float(g.uniform(0.05, 1.5)), float(g.uniform(0.05, 1.5))
        if overlap(a, r_a, b, r_b, backend="brute") != overlap(a, r_a, b, r_b, backend="tree"):
            mismatches += 1
        worst = max(
            worst,
            abs(hausdorff(a, b, backend="brute") - hausdorff(a, b, backend="tree")),
        )
    elapsed = time.time() - start
    _report(
        3,
        worst <= 1e-12 and mismatches == 0 and elapsed < 120,
        f"100 instances, max distance dev {worst:.2e}, {mismatches} coverage mismatches, {elapsed:.1f}s",
    )


def test_acceptance_04_homogeneity_reproduction():
    start = time.time()
    grid = LevelGrid.uniform(10)
    mix = SyntheticSpec(NormalUniformMixture(0.7, 1.0, 1.0, 1.0, 8.0), 100)
    gam = SyntheticSpec(Gamma(1.0, 2.0), 100)
    stats = {
        "ls1": _ls_stat("ls1", grid, None),
        "ls0": _ls_stat("ls0", grid, None),
        "energy": energy_distance,
        "t": hotelling_t2,
        "ks": ks_stat,
        "wilcoxon": wilcoxon_stat,
        "chi2": chi2_stat,
        "mmd": mmd,
    }
    pvals = {name: [] for name in stats}
    for seed in range(20):
        root = RngSpec(4200 + seed)
        p = generate(mix, root.child(0))
        q = generate(gam, root.child(1))
        for name, stat in stats.items():
            report = permutation_test(stat, p, q, 1000, root.child(2))
            pvals[name].append(report.p_value)
    medians = {name: float(np.median(v)) for name, v in pvals.items()}
    elapsed = time.time() - start
    ls_ok = medians["ls1"] <= 0.10 and medians["ls0"] <= 0.15
    rest_ok = all(medians[name] > 0.10 for name in ("energy", "t", "ks", "wilcoxon", "chi2", "mmd"))
    detail = ", ".join(f"{k}={v:.3f}" for k, v in medians.items())
    _report(4, ls_ok and rest_ok and elapsed < 600, f"median p-values: {detail}, {elapsed:.0f}s")


def test_acceptance_05_mean_shift_thresholds():
    start = time.time()
    rng = RngSpec(505)
    grid = LevelGrid.uniform(10)
    # The separation benchmarks run the level-set statistic at k = n/2
    # (n = 100 here), the calibration recorded for these protocols.
    searches = {}
    for name, stat in (
        ("ls1", _ls_stat("ls1", grid, 50)),
        ("energy", energy_distance),
        ("mmd", mmd),
    ):
        searches[name] = threshold_search(
            stat, 1, "mean-shift", rng, metric_name=name,
            reference_reps=200, power_reps=200, step=0.05,
        )
    ls1 = searches["ls1"].reported_value
    energy = searches["energy"].reported_value
    mmd_star = searches["mmd"].reported_value
    elapsed = time.time() - start
    ls1_ok = ls1 is not None and 0.30 <= ls1 <= 0.65
    energy_ok = energy is not None and 0.30 <= energy <= 0.65
    # Ordering clause: the benchmark expects the level-set distance to need
    # no larger a shift than MMD does (reference values 0.455 vs 0.980).
    ordering_ok = mmd_star is None or (ls1 is not None and ls1 <= mmd_star)
    _report(
        5,
        ls1_ok and energy_ok and ordering_ok and elapsed < 900,
        f"delta*: ls1={ls1} (in [0.30, 0.65]: {ls1_ok}), "
        f"energy={energy} (in range: {energy_ok}), "
        f"mmd={mmd_star} (ls1 <= mmd: {ordering_ok}), {elapsed:.0f}s",
    )


def test_acceptance_06_variance_thresholds():
    start = time.time()
    rng = RngSpec(606)
    grid = LevelGrid.uniform(10)
    t_search = threshold_search(
        hotelling_t2, 1, "variance", rng, metric_name="t",
        reference_reps=200, power_reps=200, step=0.05,
    )
    ls1_search = threshold_search(
        _ls_stat("ls1", grid, 50), 1, "variance", rng, metric_name="ls1",
        reference_reps=200, power_reps=200, step=0.05,
    )
    elapsed = time.time() - start
    t_exhausted = t_search.reported_value is None
    ls1_value = ls1_search.reported_value
    ls1_ok = ls1_value is not None and 1.35 <= ls1_value <= 2.2
    _report(
        6,
        t_exhausted and ls1_ok and elapsed < 900,
        f"t exhausted={t_exhausted}, ls1 1+sigma*={ls1_value}, {elapsed:.0f}s",
    )


def test_acceptance_07_kl_calibration():
    start = time.time()
    g = RngSpec(707).generator()
    p = g.standard_normal((5000, 1))
    q = g.standard_normal((5000, 1)) + 1.0
    shifted = kl_knn(p, q, 10)
    pooled = RngSpec(708).generator().standard_normal(2000)
    same = kl_knn(pooled[:1000].reshape(-1, 1), pooled[1000:].reshape(-1, 1), 10)
    elapsed = time.time() - start
    ok = 0.35 <= shifted <= 0.65 and abs(same) <= 0.1
    _report(
        7,
        ok and elapsed < 60,
        f"KL(N0||N1)={shifted:.3f} (analytic 0.5), identical-halves KL={same:.3f}, {elapsed:.1f}s",
    )


def test_acceptance_08_mds_exactness():
    start = time.time()
    pts = np.array(
        [[0.0, 0.0], [2.0, 0.0], [1.0, 2.0], [-1.5, 1.0], [0.5, -1.5], [3.0, 1.5]]
    )
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    result = classical_mds(d, 2)
    coords = result.coordinates
    rebuilt = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)
    entry_err = float(np.abs(rebuilt - d).max())

    center = np.eye(6) - np.full((6, 6), 1 / 6)
    b = -0.5 * center @ (d * d) @ center
    values, vectors = jacobi_eigh((b + b.T) / 2)
    residual = float(np.linalg.norm(vectors @ np.diag(values) @ vectors.T - (b + b.T) / 2))
    elapsed = time.time() - start
    _report(
        8,
        entry_err < 1e-9 and residual < 1e-12 * max(1.0, float(np.linalg.norm(b))) and elapsed < 1.0,
        f"entrywise reconstruction {entry_err:.2e}, eigen residual {residual:.2e}, {elapsed:.2f}s",
    )


def test_acceptance_09_permutation_calibration():
    start = time.time()
    rejections = 0
    runs = 200
    for seed in range(runs):
        root = RngSpec(9900 + seed)
        p = root.child(0).generator().standard_normal((100, 1))
        q = root.child(1).generator().standard_normal((100, 1))
        report = permutation_test(energy_distance, p, q, 200, root.child(2))
        rejections += report.p_value <= 0.05
    rate = rejections / runs
    elapsed = time.time() - start
    _report(
        9,
        0.0 <= rate <= 0.12 and elapsed < 300,
        f"null rejection rate at p<=0.05: {rate:.3f} over {runs} runs, {elapsed:.0f}s",
    )


def test_acceptance_10_cli_determinism(tmp_path):
    start = time.time()
    runner = CliRunner()
    p_path = tmp_path / "p.csv"
    q_path = tmp_path / "q.csv"
    write_csv(generate(SyntheticSpec(Normal(0.0), 60), RngSpec(1)), p_path)
    write_csv(generate(SyntheticSpec(Normal(0.8), 60), RngSpec(2)), q_path)

    img_dir = tmp_path / "imgs"
    img_dir.mkdir()
    for i in range(4):
        size = 12
        y, x = np.mgrid[0:size, 0:size]
        c = (size - 1) / 2
        mask = ((x - c) ** 2 + (y - c) ** 2 <= (3.0 + i) ** 2).astype(float)
        lsdist.write_pgm(lsdist.GrayImage(mask), img_dir / f"s{i}.pgm")

    def run_all(out_dir: Path, threads: str):
        out_dir.mkdir()
        commands = [
            ["permtest", "--p", str(p_path), "--q", str(q_path), "--stat", "ls1",
             "--n-perms", "40", "--seed", "9", "--threads", threads,
             "--out", str(out_dir / "pt.json")],
            ["bench", "mean-shift", "--dims", "1", "--metrics", "energy",
             "--seed", "3", "--r1", "20", "--r2", "20", "--grid-max", "0.8",
             "--threads", threads, "--out-dir", str(out_dir / "bench")],
            ["shapes", "--images", str(img_dir), "--mds", "2", "--seed", "4",
             "--threads", threads, "--out-dir", str(out_dir / "shapes")],
        ]
        for cmd in commands:
            result = runner.invoke(cli_main, cmd)
            assert result.exit_code == 0, f"{cmd}: {result.output}"

    digests = {}
    for tag, threads in (("r1t1", "1"), ("r2t1", "1"), ("r3t4", "4")):
        out_dir = tmp_path / tag
        run_all(out_dir, threads)
        digest = {}
        for f in sorted(out_dir.rglob("*")):
            if f.is_file():
                digest[str(f.relative_to(out_dir))] = f.read_bytes()
        digests[tag] = digest

    same_rerun = digests["r1t1"] == digests["r2t1"]
    same_threads = digests["r1t1"] == digests["r3t4"]
    elapsed = time.time() - start
    n_files = len(digests["r1t1"])
    _report(
        10,
        same_rerun and same_threads and elapsed < 120,
        f"{n_files} output files byte-identical across reruns ({same_rerun}) "
        f"and threads 1 vs 4 ({same_threads}), {elapsed:.0f}s",
    )
