"""Greedy group formation over score-sorted data.

Points are scanned in nondecreasing score order; each unassigned point starts
a group and absorbs every unassigned point within ``radius`` of it. The scan
for members stops early at a score cutoff that is provably safe:

  Manhattan   scores past alpha_i + radius are farther than radius by the
              reverse triangle inequality.
  Tanimoto    scores past alpha_i / (1 - radius) are farther than radius by
              the intersection bound on pop-counts, which is at least as
              tight as the reverse triangle inequality.

Pruning changes cost only, never output: disabling it yields identical groups.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from sortclust.data import DenseDataset, FingerprintSet, ScoredOrder
from sortclust.errors import InvalidInputError
from sortclust.metrics import (
    DistanceKind,
    tanimoto_within_radius,
)

# Below this many candidates a batch is evaluated on the calling thread even
# when a worker pool is available; splitting tiny batches only adds overhead.
_MIN_PARALLEL_BATCH = 8192


def candidate_window_norm(
    alpha_i: float, sorted_scores: np.ndarray, start_pos: int, radius: float
) -> int:
    """Last sorted position whose score can be within ``radius`` of score alpha_i."""
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    last = int(np.searchsorted(sorted_scores, alpha_i + radius, side="right")) - 1
    return max(last, start_pos)


def candidate_window_tanimoto(
    alpha_i: int, sorted_scores: np.ndarray, start_pos: int, radius: float
) -> int:
    """Last sorted position passing the pop-count cutoff alpha_i / (1 - radius).

    The cutoff is evaluated in exact integer arithmetic (the float radius is
    converted to its exact rational value), so no point within ``radius`` is
    ever excluded. For radius >= 1 no score-based pruning is possible and the
    window covers all remaining points.
    """
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    n = len(sorted_scores)
    if radius >= 1:
        return n - 1
    one_minus_r = Fraction(1) - Fraction(radius)
    cutoff = (int(alpha_i) * one_minus_r.denominator) // one_minus_r.numerator
    last = int(np.searchsorted(sorted_scores, cutoff, side="right")) - 1
    return max(last, start_pos)


def candidate_window(
    metric: DistanceKind,
    alpha_i,
    sorted_scores: np.ndarray,
    start_pos: int,
    radius: float,
) -> int:
    if metric is DistanceKind.TANIMOTO:
        return candidate_window_tanimoto(alpha_i, sorted_scores, start_pos, radius)
    return candidate_window_norm(alpha_i, sorted_scores, start_pos, radius)


@dataclass
class AggregationStats:
    distance_evals: int = 0
    candidates_scanned: int = 0


@dataclass(frozen=True)
class AggregationResult:
    """Group assignment produced by the greedy scan.

    ``group_label`` and ``dist_to_start`` are indexed by original point
    index; ``starting_points[g]`` is the original index of group g's starting
    point, which is always the group member with the lowest sorted position.
    """

    group_label: np.ndarray
    starting_points: np.ndarray
    order: ScoredOrder
    stats: AggregationStats
    dist_to_start: np.ndarray

    @property
    def n_groups(self) -> int:
        return len(self.starting_points)


class _SortedBatchEval:
    """Distance evaluation between sorted positions, optionally threaded.

    Candidate batches may be split across workers; each pair's computation is
    independent and chunk results are concatenated in candidate order, so the
    output is bit-identical for every thread count.
    """

    def __init__(self, data, metric: DistanceKind, perm: np.ndarray, threads: int = 1):
        self.metric = metric
        if metric is DistanceKind.TANIMOTO:
            if not isinstance(data, FingerprintSet):
                raise InvalidInputError("Tanimoto metric requires a FingerprintSet")
            self.words = data.bits[perm]
            self.scores = data.scores[perm]
        elif metric is DistanceKind.MANHATTAN:
            if not isinstance(data, DenseDataset):
                raise InvalidInputError("Manhattan metric requires a DenseDataset")
            self.points = data.points[perm]
        else:
            raise InvalidInputError(f"unsupported metric: {metric}")
        self.pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        self.threads = threads

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def _map_pair(self, fn, candidates: np.ndarray):
        """Run fn over candidate chunks; fn returns a (distances, mask) pair."""
        if self.pool is None or candidates.size < _MIN_PARALLEL_BATCH:
            return fn(candidates)
        chunks = np.array_split(candidates, self.threads)
        parts = list(self.pool.map(fn, chunks))
        return (
            np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
        )

    def within(self, i: int, candidates: np.ndarray, radius: float):
        """(distances, within-radius mask) from sorted position i to candidates."""
        if candidates.size == 0:
            return np.zeros(0), np.zeros(0, dtype=bool)
        if self.metric is DistanceKind.TANIMOTO:
            qw = self.words[i]
            alpha_q = int(self.scores[i])

            def eval_chunk(cands):
                dots = np.bitwise_count(self.words[cands] & qw).sum(axis=1, dtype=np.int64)
                denom = alpha_q + self.scores[cands] - dots
                dists = np.zeros(cands.shape, dtype=np.float64)
                ok = denom > 0
                dists[ok] = (denom[ok] - dots[ok]) / denom[ok]
                mask = tanimoto_within_radius(dots, alpha_q, self.scores[cands], radius)
                return dists, mask

        else:
            q = self.points[i]

            def eval_chunk(cands):
                dists = np.abs(self.points[cands] - q).sum(axis=1)
                return dists, dists <= radius

        return self._map_pair(eval_chunk, candidates)


def _validate_radius(metric: DistanceKind, radius: float) -> None:
    if metric is DistanceKind.TANIMOTO:
        if not 0 < radius < 1:
            raise InvalidInputError(
                f"Tanimoto radius must lie in (0, 1), got {radius}"
            )
    else:
        if radius <= 0:
            raise InvalidInputError(f"radius must be positive, got {radius}")


def aggregate(
    data,
    order: ScoredOrder,
    metric: DistanceKind,
    radius: float,
    prune: bool = True,
    threads: int = 1,
) -> AggregationResult:
    """Assign every point to a group by the greedy sorted scan.

    Deterministic given (data, metric, radius); ``prune=False`` forces the
    candidate window to cover all remaining points, which never changes the
    assignment, only the amount of distance work counted in ``stats``.
    """
    _validate_radius(metric, radius)
    n = order.n
    if data.n != n:
        raise InvalidInputError("order does not match dataset size")
    perm = order.perm
    sorted_scores = order.sorted_scores
    evaluator = _SortedBatchEval(data, metric, perm, threads=threads)
    labels_sorted = np.full(n, -1, dtype=np.int64)
    dist_sorted = np.zeros(n, dtype=np.float64)
    starting_points: list[int] = []
    stats = AggregationStats()

    try:
        group = 0
        for i in range(n):
            if labels_sorted[i] >= 0:
                continue
            labels_sorted[i] = group
            starting_points.append(int(perm[i]))
            if prune:
                last = candidate_window(metric, sorted_scores[i], sorted_scores, i, radius)
            else:
                last = n - 1
            stats.candidates_scanned += last - i
            if last > i:
                span = labels_sorted[i + 1 : last + 1]
                cands = np.nonzero(span < 0)[0] + i + 1
                if cands.size:
                    dists, within = evaluator.within(i, cands, radius)
                    stats.distance_evals += int(cands.size)
                    members = cands[within]
                    labels_sorted[members] = group
                    dist_sorted[members] = dists[within]
            group += 1
    finally:
        evaluator.close()

    group_label = np.empty(n, dtype=np.int64)
    group_label[perm] = labels_sorted
    dist_to_start = np.empty(n, dtype=np.float64)
    dist_to_start[perm] = dist_sorted
    return AggregationResult(
        group_label=group_label,
        starting_points=np.array(starting_points, dtype=np.int64),
        order=order,
        stats=stats,
        dist_to_start=dist_to_start,
    )
