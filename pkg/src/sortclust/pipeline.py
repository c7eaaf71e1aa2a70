"""End-to-end clustering: sort, aggregate, merge, redistribute, explain."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from sortclust.aggregation import AggregationResult, aggregate
from sortclust.data import (
    DenseDataset,
    FingerprintSet,
    orthant_shift,
    score_and_sort,
)
from sortclust.errors import InternalInvariantError, InvalidInputError
from sortclust.explain import ExplainGraph, build_explain_graph
from sortclust.merging import (
    DEFAULT_SCALE,
    MergeResult,
    MinPtsResult,
    Reassignment,
    apply_min_pts,
    merge_groups,
)
from sortclust.metrics import DistanceKind


@dataclass(frozen=True)
class PhaseTimings:
    sort_s: float = 0.0
    aggregate_s: float = 0.0
    merge_s: float = 0.0
    minpts_s: float = 0.0

    @property
    def total_s(self) -> float:
        return self.sort_s + self.aggregate_s + self.merge_s + self.minpts_s


@dataclass(frozen=True)
class ClusterModel:
    """Final clustering plus the full decision trail.

    ``labels[i] == cluster_of_group[group_of_point[i]]`` always holds;
    cluster ids are numbered by first appearance in original index order.
    Cluster ids inside ``reassignment_log`` refer to the pre-redistribution
    numbering produced by the merge phase.
    """

    labels: np.ndarray
    group_of_point: np.ndarray
    cluster_of_group: np.ndarray
    starting_points: np.ndarray
    params: dict
    explain: ExplainGraph
    reassignment_log: tuple[Reassignment, ...]
    minpts_fallback: bool
    stats: dict
    timings: PhaseTimings
    aggregation: AggregationResult

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def n_groups(self) -> int:
        return len(self.starting_points)


def _relabel_first_appearance(point_values: np.ndarray) -> np.ndarray:
    """Map arbitrary ids to 0..C-1 by order of first appearance."""
    uniq, first = np.unique(point_values, return_index=True)
    order = uniq[np.argsort(first)]
    remap = np.empty(int(point_values.max()) + 1, dtype=np.int64)
    remap[order] = np.arange(len(order))
    return remap


def cluster_data(
    data,
    metric: DistanceKind,
    radius: float,
    min_pts: int = 1,
    scale: float = DEFAULT_SCALE,
    shift: bool = True,
    prune: bool = True,
    threads: int = 1,
) -> ClusterModel:
    """Cluster a DenseDataset (Manhattan) or FingerprintSet (Tanimoto).

    Manhattan data is orthant-shifted first unless ``shift=False`` or the
    dataset already records a shift; shifting preserves all pairwise
    distances, so it affects the work counters only, never the labels.
    """
    if min_pts < 1:
        raise InvalidInputError("min_pts must be at least 1")
    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    if metric is DistanceKind.MANHATTAN and not isinstance(data, DenseDataset):
        raise InvalidInputError("Manhattan metric requires a DenseDataset")
    if metric is DistanceKind.TANIMOTO and not isinstance(data, FingerprintSet):
        raise InvalidInputError("Tanimoto metric requires a FingerprintSet")

    shift_applied = False
    if metric is DistanceKind.MANHATTAN and shift and data.shift is None:
        data, _ = orthant_shift(data)
        shift_applied = True

    t0 = time.perf_counter()
    order = score_and_sort(data)
    t1 = time.perf_counter()
    agg = aggregate(data, order, metric, radius, prune=prune, threads=threads)
    t2 = time.perf_counter()
    merge = merge_groups(agg, data, metric, radius, scale, prune=prune, threads=threads)
    t3 = time.perf_counter()
    minpts = apply_min_pts(merge, agg, data, metric, min_pts)
    t4 = time.perf_counter()

    point_clusters = minpts.cluster_of_group[agg.group_label]
    remap = _relabel_first_appearance(point_clusters)
    labels = remap[point_clusters]
    cluster_of_group = remap[minpts.cluster_of_group]
    if not np.array_equal(labels, cluster_of_group[agg.group_label]):
        raise InternalInvariantError("labels disagree with cluster_of_group composition")

    graph = build_explain_graph(agg, merge, minpts, labels)
    params = {
        "metric": metric.value,
        "radius": radius,
        "scale": scale,
        "min_pts": min_pts,
        "shift_applied": shift_applied,
        "prune": prune,
    }
    stats = {
        "distance_evals_aggregation": agg.stats.distance_evals,
        "candidates_scanned": agg.stats.candidates_scanned,
        "distance_evals_merge": merge.distance_evals,
        "distance_evals_minpts": minpts.distance_evals,
        "distance_evals_total": (
            agg.stats.distance_evals + merge.distance_evals + minpts.distance_evals
        ),
        "groups": agg.n_groups,
        "clusters": int(labels.max()) + 1,
    }
    timings = PhaseTimings(
        sort_s=t1 - t0,
        aggregate_s=t2 - t1,
        merge_s=t3 - t2,
        minpts_s=t4 - t3,
    )
    return ClusterModel(
        labels=labels,
        group_of_point=agg.group_label.copy(),
        cluster_of_group=cluster_of_group,
        starting_points=agg.starting_points.copy(),
        params=params,
        explain=graph,
        reassignment_log=minpts.reassignment_log,
        minpts_fallback=minpts.fallback,
        stats=stats,
        timings=timings,
        aggregation=agg,
    )


def cluster_fingerprints(
    fps: FingerprintSet,
    radius: float,
    min_pts: int = 1,
    scale: float = DEFAULT_SCALE,
    prune: bool = True,
    threads: int = 1,
) -> ClusterModel:
    """Tanimoto clustering of a fingerprint set."""
    return cluster_data(
        fps,
        DistanceKind.TANIMOTO,
        radius,
        min_pts=min_pts,
        scale=scale,
        prune=prune,
        threads=threads,
    )


def cluster_dense(
    data: DenseDataset | np.ndarray,
    radius: float,
    min_pts: int = 1,
    scale: float = DEFAULT_SCALE,
    shift: bool = True,
    prune: bool = True,
    threads: int = 1,
) -> ClusterModel:
    """Manhattan clustering of dense real-valued points."""
    if not isinstance(data, DenseDataset):
        data = DenseDataset(points=np.asarray(data, dtype=np.float64))
    return cluster_data(
        data,
        DistanceKind.MANHATTAN,
        radius,
        min_pts=min_pts,
        scale=scale,
        shift=shift,
        prune=prune,
        threads=threads,
    )
