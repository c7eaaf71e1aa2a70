"""Greedy aggregation: candidate windows, soundness, transparency, oracles."""

import numpy as np
import pytest
from fractions import Fraction

from sortclust.aggregation import (
    aggregate,
    candidate_window_norm,
    candidate_window_tanimoto,
)
from sortclust.data import DenseDataset, FingerprintSet, score_and_sort
from sortclust.errors import InvalidInputError
from sortclust.metrics import DistanceKind

from reference import (
    brute_force_groups,
    naive_manhattan,
    partitions_equal,
    random_fingerprint_rows,
    tanimoto_exact,
)


def triangle_window_all_ones(alpha_i: int, sorted_scores, start_pos: int, radius: float, d: int) -> int:
    """Reverse-triangle window with the all-ones reference vector.

    Tanimoto distance to the all-ones vector is 1 - score/d, so the triangle
    bound keeps scores up to alpha_i + radius * d. Used here only as the
    looser comparison baseline.
    """
    bound = alpha_i + radius * d
    last = int(np.searchsorted(sorted_scores, bound, side="right")) - 1
    return max(last, start_pos)


class TestWindowNorm:
    def test_example(self):
        scores = np.array([0.0, 1.0, 2.0, 3.0])
        assert candidate_window_norm(0.0, scores, 0, 1.5) == 1

    def test_radius_covers_all(self):
        scores = np.array([0.0, 1.0, 2.0, 3.0])
        assert candidate_window_norm(0.0, scores, 0, 3.0) == 3

    def test_all_scores_equal(self):
        scores = np.full(7, 4.2)
        assert candidate_window_norm(4.2, scores, 0, 1e-9) == 6

    def test_invalid_radius(self):
        with pytest.raises(InvalidInputError):
            candidate_window_norm(0.0, np.array([0.0]), 0, 0.0)


class TestWindowTanimoto:
    def test_cutoff_example(self):
        # alpha 50, radius 0.4: cutoff 50 / 0.6 = 83.33...
        scores = np.arange(0, 200)
        last = candidate_window_tanimoto(50, scores, 50, 0.4)
        assert scores[last] == 83

    def test_tiny_radius_keeps_equal_scores_only(self):
        scores = np.array([5, 5, 5, 6, 7])
        last = candidate_window_tanimoto(5, scores, 0, 1e-9)
        assert last == 2

    def test_zero_score_keeps_zeros_only(self):
        scores = np.array([0, 0, 1, 4])
        assert candidate_window_tanimoto(0, scores, 0, 0.4) == 1

    def test_radius_at_or_above_one_disables_pruning(self):
        scores = np.array([1, 2, 3])
        assert candidate_window_tanimoto(1, scores, 0, 1.0) == 2
        assert candidate_window_tanimoto(1, scores, 0, 1.7) == 2

    def test_invalid_radius(self):
        with pytest.raises(InvalidInputError):
            candidate_window_tanimoto(1, np.array([1]), 0, -0.2)

    def test_exact_rational_cutoff(self):
        # scanning onward from the query position, j stays in the window iff
        # alpha_j * (1 - radius) <= alpha_i in exact arithmetic
        rng = np.random.default_rng(4)
        for _ in range(200):
            radius = float(rng.uniform(0.01, 0.99))
            scores = np.sort(rng.integers(0, 400, size=50))
            pos = int(rng.integers(50))
            alpha_i = int(scores[pos])
            last = candidate_window_tanimoto(alpha_i, scores, pos, radius)
            one_minus_r = Fraction(1) - Fraction(radius)
            for j in range(pos, 50):
                included = j <= last
                assert included == (Fraction(int(scores[j])) * one_minus_r <= alpha_i)


class TestBaldiSharperThanTriangle:
    def test_bound_inequality_random_pairs(self):
        # 1 - a_i/a_j >= (a_j - a_i)/d whenever 0 < a_i <= a_j <= d,
        # verified in exact integer arithmetic
        rng = np.random.default_rng(8)
        d = rng.integers(1, 4097, size=100_000)
        a_j = rng.integers(1, d + 1)
        a_i = rng.integers(1, a_j + 1)
        lhs_minus_rhs = (a_j - a_i) * d.astype(object) - (a_j - a_i) * a_j.astype(object)
        assert all(v >= 0 for v in lhs_minus_rhs)

    def test_window_containment_random_arrays(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            d = int(rng.integers(8, 512))
            n = int(rng.integers(2, 80))
            scores = np.sort(rng.integers(0, d + 1, size=n))
            pos = int(rng.integers(n))
            radius = float(rng.uniform(0.05, 0.95))
            baldi = candidate_window_tanimoto(int(scores[pos]), scores, pos, radius)
            triangle = triangle_window_all_ones(int(scores[pos]), scores, pos, radius, d)
            assert baldi <= triangle


def make_fingerprint_instance(rng, n_max=60, d_max=64):
    n = int(rng.integers(2, n_max))
    d = int(rng.integers(4, d_max + 1))
    rows = random_fingerprint_rows(rng, n, d, density=rng.uniform(0.05, 0.9, size=n))
    radius = float(rng.uniform(0.05, 0.95))
    return FingerprintSet.from_bool_matrix(rows), rows, radius


def make_dense_instance(rng, n_max=60, d_max=8):
    n = int(rng.integers(2, n_max))
    d = int(rng.integers(1, d_max + 1))
    pts = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0)
    radius = float(rng.uniform(0.2, 3.0))
    return DenseDataset(points=pts), pts, radius


class TestAggregate:
    def test_two_blobs_disjoint_score_ranges(self):
        # blob A supported on low bits with scores 4..6, blob B on high bits
        # with scores 10..12; intra distance <= 1/3 < 0.4 < 1 = inter distance
        d = 32
        rows = np.zeros((6, d), dtype=bool)
        rows[0, :4] = True
        rows[1, :5] = True
        rows[2, :6] = True
        rows[3, 16:26] = True
        rows[4, 16:27] = True
        rows[5, 16:28] = True
        fps = FingerprintSet.from_bool_matrix(rows)
        order = score_and_sort(fps)
        agg = aggregate(fps, order, DistanceKind.TANIMOTO, radius=0.4)
        assert agg.n_groups == 2
        assert agg.starting_points.tolist() == [0, 3]  # lowest score of each blob
        assert partitions_equal(agg.group_label, [0, 0, 0, 1, 1, 1])
        # brute-force greedy oracle agrees
        rows_sorted = [rows[i] for i in order.perm]
        expected, _ = brute_force_groups(rows_sorted, "tanimoto", 0.4)
        got_sorted = agg.group_label[order.perm]
        assert partitions_equal(got_sorted, expected)

    def test_radius_covering_diameter_gives_one_group(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(-1, 1, size=(10, 3))
        ds = DenseDataset(points=pts)
        agg = aggregate(ds, score_and_sort(ds), DistanceKind.MANHATTAN, radius=100.0)
        assert agg.n_groups == 1
        assert (agg.group_label == 0).all()

    def test_single_point(self):
        ds = DenseDataset(points=np.array([[1.0, 2.0]]))
        agg = aggregate(ds, score_and_sort(ds), DistanceKind.MANHATTAN, radius=0.5)
        assert agg.n_groups == 1
        assert agg.starting_points.tolist() == [0]

    def test_tanimoto_radius_domain(self):
        fps = FingerprintSet.from_bool_matrix(np.array([[True, False]]))
        order = score_and_sort(fps)
        for bad in (0.0, 1.0, 1.2, -0.1):
            with pytest.raises(InvalidInputError):
                aggregate(fps, order, DistanceKind.TANIMOTO, radius=bad)

    def test_metric_data_mismatch(self):
        ds = DenseDataset(points=np.array([[1.0]]))
        with pytest.raises(InvalidInputError):
            aggregate(ds, score_and_sort(ds), DistanceKind.TANIMOTO, radius=0.4)

    def test_members_within_radius_of_start(self):
        rng = np.random.default_rng(31)
        fps, rows, radius = make_fingerprint_instance(rng)
        order = score_and_sort(fps)
        agg = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius)
        for g, start in enumerate(agg.starting_points):
            members = np.nonzero(agg.group_label == g)[0]
            for m in members:
                assert tanimoto_exact(rows[start], rows[m]) <= Fraction(radius)

    def test_dist_to_start_recorded(self):
        rng = np.random.default_rng(41)
        ds, pts, radius = make_dense_instance(rng)
        order = score_and_sort(ds)
        agg = aggregate(ds, order, DistanceKind.MANHATTAN, radius=radius)
        for p in range(ds.n):
            start = agg.starting_points[agg.group_label[p]]
            assert agg.dist_to_start[p] == pytest.approx(
                naive_manhattan(pts[start], pts[p]), abs=1e-12
            )


class TestPruningProperties:
    def test_transparency_fingerprints(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            fps, _, radius = make_fingerprint_instance(rng)
            order = score_and_sort(fps)
            with_pruning = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius)
            without = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius, prune=False)
            assert np.array_equal(with_pruning.group_label, without.group_label)
            assert np.array_equal(with_pruning.starting_points, without.starting_points)
            assert with_pruning.stats.distance_evals <= without.stats.distance_evals

    def test_transparency_dense(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            ds, _, radius = make_dense_instance(rng)
            order = score_and_sort(ds)
            with_pruning = aggregate(ds, order, DistanceKind.MANHATTAN, radius=radius)
            without = aggregate(ds, order, DistanceKind.MANHATTAN, radius=radius, prune=False)
            assert np.array_equal(with_pruning.group_label, without.group_label)
            assert np.array_equal(with_pruning.starting_points, without.starting_points)
            assert with_pruning.stats.distance_evals <= without.stats.distance_evals

    def test_soundness_tanimoto_windows(self):
        # every point past the window is strictly farther than the radius,
        # checked in exact rational arithmetic
        rng = np.random.default_rng(19)
        for _ in range(25):
            fps, rows, radius = make_fingerprint_instance(rng)
            order = score_and_sort(fps)
            rows_sorted = rows[order.perm]
            scores = order.sorted_scores
            for i in range(fps.n):
                last = candidate_window_tanimoto(int(scores[i]), scores, i, radius)
                for j in range(last + 1, fps.n):
                    assert tanimoto_exact(rows_sorted[i], rows_sorted[j]) > Fraction(radius)

    def test_soundness_manhattan_windows(self):
        rng = np.random.default_rng(29)
        for _ in range(25):
            ds, pts, radius = make_dense_instance(rng)
            order = score_and_sort(ds)
            pts_sorted = pts[order.perm]
            scores = order.sorted_scores
            for i in range(ds.n):
                last = candidate_window_norm(scores[i], scores, i, radius)
                for j in range(last + 1, ds.n):
                    assert naive_manhattan(pts_sorted[i], pts_sorted[j]) > radius - 1e-12

    def test_matches_brute_force_greedy(self):
        rng = np.random.default_rng(37)
        for _ in range(15):
            fps, rows, radius = make_fingerprint_instance(rng, n_max=40)
            order = score_and_sort(fps)
            agg = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius)
            expected, starts = brute_force_groups(
                [rows[i] for i in order.perm], "tanimoto", radius
            )
            assert partitions_equal(agg.group_label[order.perm], expected)
            assert agg.starting_points.tolist() == [int(order.perm[s]) for s in starts]

    def test_thread_count_does_not_change_output(self):
        rng = np.random.default_rng(43)
        fps, _, radius = make_fingerprint_instance(rng, n_max=60)
        order = score_and_sort(fps)
        base = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius, threads=1)
        for threads in (2, 5):
            other = aggregate(fps, order, DistanceKind.TANIMOTO, radius=radius, threads=threads)
            assert np.array_equal(base.group_label, other.group_label)
            assert np.array_equal(base.dist_to_start, other.dist_to_start)
