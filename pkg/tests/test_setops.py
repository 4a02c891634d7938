import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsdist import RngSpec, covering_indicator, hausdorff, overlap
from lsdist.setops import pairwise_indicator_total, uncovered_points


def pts(*values):
    return np.asarray(values, dtype=float).reshape(-1, 1)


def test_indicator_boundary_and_interior():
    assert covering_indicator([0.0], [1.0], 1.0, 0.5) == 1
    assert covering_indicator([0.0], [1.0], 0.4, 0.4) == 0
    assert covering_indicator([2.0], [2.0], 0.0, 0.0) == 1


def test_overlap_identity():
    a = pts(0.0, 1.0, 2.0)
    s = overlap(a, 0.5, a, 0.5)
    assert s.sym_diff == 0 and s.jaccard_term == 0.0


def test_overlap_disjoint():
    s = overlap(pts(0.0), 1.0, pts(10.0), 1.0)
    assert s.sym_diff == 2 and s.union == 2 and s.jaccard_term == 1.0


def test_overlap_hand_case():
    # One point of each sample covered by the other's covering.
    s = overlap(pts(0.0, 1.0), 1.0, pts(1.05, 5.0), 0.5)
    assert s.covered_b == 1  # 1.05 is within 1.0 of the point 1
    assert s.covered_a == 1  # 1 is within 0.5 of 1.05
    assert s.sym_diff == 2 and s.union == 4
    assert s.jaccard_term == 0.5


def test_overlap_hand_case_asymmetric_radii():
    # 1.55 is inside A's covering (radius 1) but no point of A is within
    # 0.5 of B, so exactly one of the four points is covered.
    s = overlap(pts(0.0, 1.0), 1.0, pts(1.55, 5.0), 0.5)
    assert (s.covered_a, s.covered_b) == (0, 1)
    assert s.sym_diff == 3 and s.union == 4
    assert s.jaccard_term == 0.75


def test_overlap_empty_conventions():
    empty = np.empty((0, 1))
    assert overlap(empty, 1.0, empty, 1.0).jaccard_term == 0.0
    assert overlap(pts(0.0), 1.0, empty, 1.0).jaccard_term == 1.0
    assert overlap(empty, 1.0, pts(0.0), 1.0).jaccard_term == 1.0


def test_overlap_dimension_mismatch():
    with pytest.raises(ValueError):
        overlap(np.zeros((2, 2)), 1.0, np.zeros((2, 3)), 1.0)


def test_hausdorff_hand_cases():
    assert hausdorff(pts(0.0), pts(3.0)) == 3.0
    assert hausdorff(pts(0.0, 1.0), pts(0.0, 1.0)) == 0.0
    assert hausdorff(pts(0.0, 10.0), pts(1.0)) == 9.0
    assert hausdorff(np.empty((0, 1)), pts(1.0)) == 0.0
    assert hausdorff(np.empty((0, 1)), np.empty((0, 1))) == 0.0


def test_literal_pair_count_exceeds_point_count():
    a = pts(0.0, 0.1)
    b = pts(0.05, 0.15)
    assert pairwise_indicator_total(a, 1.0, b, 1.0) == 4
    s = overlap(a, 1.0, b, 1.0)
    assert s.covered_a == 2 and s.covered_b == 2


def test_uncovered_points():
    free_a, free_b = uncovered_points(pts(0.0, 1.0), 1.0, pts(1.05, 5.0), 0.5)
    assert free_a.ravel().tolist() == [0.0]
    assert free_b.ravel().tolist() == [5.0]


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 9999),
    n_a=st.integers(0, 25),
    n_b=st.integers(0, 25),
    r_a=st.floats(0.0, 3.0),
    r_b=st.floats(0.0, 3.0),
)
def test_overlap_swap_symmetry(seed, n_a, n_b, r_a, r_b):
    g = RngSpec(seed).generator()
    a = g.standard_normal((n_a, 2))
    b = g.standard_normal((n_b, 2))
    s1 = overlap(a, r_a, b, r_b)
    s2 = overlap(b, r_b, a, r_a)
    assert s1.sym_diff == s2.sym_diff
    assert s1.union == s2.union
    assert s1.jaccard_term == s2.jaccard_term


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 9999), grow=st.floats(0.0, 2.0))
def test_radius_monotonicity(seed, grow):
    g = RngSpec(seed).generator()
    a = g.standard_normal((15, 2))
    b = g.standard_normal((12, 2))
    base = overlap(a, 0.5, b, 0.4)
    bigger = overlap(a, 0.5 + grow, b, 0.4 + grow)
    assert bigger.sym_diff <= base.sym_diff


def test_jaccard_invariant_under_similarity():
    g = RngSpec(33).generator()
    a = g.standard_normal((20, 2))
    b = g.standard_normal((18, 2))
    r_a, r_b = 0.8, 0.6
    s1 = overlap(a, r_a, b, r_b)
    theta = 1.2
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    scale = 2.5
    shift = np.array([4.0, -7.0])
    s2 = overlap(a @ rot.T * scale + shift, r_a * scale, b @ rot.T * scale + shift, r_b * scale)
    assert s1.jaccard_term == s2.jaccard_term


def test_coverage_backends_agree():
    rng = RngSpec(55)
    for trial in range(100):
        g = rng.child(trial).generator()
        n_a = int(g.integers(1, 300))
        n_b = int(g.integers(1, 300))
        d = int(g.integers(1, 4))
        a = g.standard_normal((n_a, d))
        b = g.standard_normal((n_b, d))
        r_a, r_b = float(g.random()), float(g.random())
        slow = overlap(a, r_a, b, r_b, backend="brute")
        fast = overlap(a, r_a, b, r_b, backend="tree")
        assert slow == fast
        assert hausdorff(a, b, backend="brute") == pytest.approx(
            hausdorff(a, b, backend="tree"), abs=1e-12)
