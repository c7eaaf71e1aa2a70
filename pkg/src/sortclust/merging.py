"""Group merging into clusters and minimum-cluster-size redistribution.

Clusters are the connected components of the graph on group starting points
with edges wherever the starting-point distance is at most scale * radius.
The component search reuses the same score-window pruning as aggregation.

With min_pts > 1, clusters holding fewer than min_pts points are dissolved
and each of their groups is attached to the cluster of the nearest starting
point among clusters that meet the threshold. All decisions are taken against
a snapshot of the cluster map from before the pass, so the outcome does not
depend on processing order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sortclust.aggregation import AggregationResult, candidate_window, _SortedBatchEval
from sortclust.data import manhattan_scores
from sortclust.metrics import DistanceKind

DEFAULT_SCALE = 1.5


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


@dataclass(frozen=True)
class MergeEdge:
    """Starting-point pair that satisfied the merge criterion."""

    group_a: int
    group_b: int
    distance: float


@dataclass(frozen=True)
class MergeResult:
    cluster_of_group: np.ndarray  # component id per group, first-appearance order
    merge_edges: tuple[MergeEdge, ...]
    distance_evals: int


@dataclass(frozen=True)
class Reassignment:
    """One group moved off a dissolved cluster during redistribution.

    Cluster ids refer to the pre-redistribution numbering (the component ids
    of the merge phase).
    """

    group: int
    old_cluster: int
    new_cluster: int
    target_starting_point: int
    distance: float


@dataclass(frozen=True)
class MinPtsResult:
    cluster_of_group: np.ndarray  # surviving pre-redistribution ids
    reassignment_log: tuple[Reassignment, ...]
    removed_merge_edges: frozenset[int]  # indices into MergeResult.merge_edges
    fallback: bool  # no cluster met the threshold; labels left unchanged
    distance_evals: int


def _canonical_components(uf: UnionFind, group_label: np.ndarray, n_groups: int) -> np.ndarray:
    """Component id per group, numbered by first appearance in point order."""
    roots = np.array([uf.find(g) for g in range(n_groups)], dtype=np.int64)
    point_roots = roots[group_label]
    uniq, first = np.unique(point_roots, return_index=True)
    remap = {int(r): c for c, r in enumerate(uniq[np.argsort(first)])}
    return np.array([remap[int(r)] for r in roots], dtype=np.int64)


def merge_groups(
    agg: AggregationResult,
    data,
    metric: DistanceKind,
    radius: float,
    scale: float = DEFAULT_SCALE,
    prune: bool = True,
    threads: int = 1,
) -> MergeResult:
    """Connect starting points within scale * radius; components become clusters.

    For the Tanimoto metric the effective threshold is clamped to 1, the
    metric's maximum.
    """
    sp = agg.starting_points  # original indices, already in ascending score order
    n_groups = len(sp)
    threshold = scale * radius
    if metric is DistanceKind.TANIMOTO:
        threshold = min(threshold, 1.0)
        sp_scores = data.scores[sp]
    else:
        sp_scores = manhattan_scores(data.points[sp])

    uf = UnionFind(n_groups)
    edges: list[MergeEdge] = []
    evals = 0
    evaluator = _SortedBatchEval(data, metric, sp, threads=threads)
    try:
        for k in range(n_groups):
            if prune:
                # candidate_window copes with threshold >= 1 (full window).
                last = candidate_window(metric, sp_scores[k], sp_scores, k, threshold)
            else:
                last = n_groups - 1
            if last <= k:
                continue
            cands = np.arange(k + 1, last + 1)
            dists, within = evaluator.within(k, cands, threshold)
            evals += int(cands.size)
            for pos, dist in zip(cands[within], dists[within]):
                uf.union(k, int(pos))
                edges.append(MergeEdge(group_a=k, group_b=int(pos), distance=float(dist)))
    finally:
        evaluator.close()

    cluster_of_group = _canonical_components(uf, agg.group_label, n_groups)
    return MergeResult(
        cluster_of_group=cluster_of_group,
        merge_edges=tuple(edges),
        distance_evals=evals,
    )


def apply_min_pts(
    merge: MergeResult,
    agg: AggregationResult,
    data,
    metric: DistanceKind,
    min_pts: int,
) -> MinPtsResult:
    """Dissolve clusters smaller than min_pts and reattach their groups.

    Each group of a dissolved cluster goes to the cluster of its nearest
    starting point among clusters meeting the threshold (ties broken by the
    smaller starting-point index). If no cluster meets the threshold the
    clustering is returned unchanged with the fallback flag set.
    """
    cluster_of_group = merge.cluster_of_group
    if min_pts <= 1:
        return MinPtsResult(cluster_of_group, (), frozenset(), False, 0)

    point_clusters = cluster_of_group[agg.group_label]
    sizes = np.bincount(point_clusters, minlength=int(cluster_of_group.max()) + 1)
    small = np.nonzero(sizes < min_pts)[0]
    small = small[sizes[small] > 0]
    if small.size == 0:
        return MinPtsResult(cluster_of_group, (), frozenset(), False, 0)
    big_mask = sizes >= min_pts
    if not big_mask.any():
        return MinPtsResult(cluster_of_group, (), frozenset(), True, 0)

    sp = agg.starting_points
    big_groups = np.nonzero(big_mask[cluster_of_group])[0]
    big_sp = sp[big_groups]

    # Dissolved clusters in increasing size order, ties by smallest member index.
    min_member = np.full(len(sizes), np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(min_member, point_clusters, np.arange(len(point_clusters)))
    small_order = sorted(small, key=lambda c: (int(sizes[c]), int(min_member[c])))

    log: list[Reassignment] = []
    new_cluster_of_group = cluster_of_group.copy()
    evals = 0
    for cluster in small_order:
        for g in np.nonzero(cluster_of_group == cluster)[0]:
            dists = _starting_point_distances(data, metric, int(sp[g]), big_sp)
            evals += int(big_sp.size)
            best = int(np.lexsort((big_sp, dists))[0])
            target_group = int(big_groups[best])
            entry = Reassignment(
                group=int(g),
                old_cluster=int(cluster),
                new_cluster=int(cluster_of_group[target_group]),
                target_starting_point=int(big_sp[best]),
                distance=float(dists[best]),
            )
            log.append(entry)
            new_cluster_of_group[g] = entry.new_cluster

    dissolved = set(int(c) for c in small)
    removed = frozenset(
        i
        for i, e in enumerate(merge.merge_edges)
        if int(cluster_of_group[e.group_a]) in dissolved
    )
    return MinPtsResult(
        cluster_of_group=new_cluster_of_group,
        reassignment_log=tuple(log),
        removed_merge_edges=removed,
        fallback=False,
        distance_evals=evals,
    )


def _starting_point_distances(
    data, metric: DistanceKind, query_index: int, candidate_indices: np.ndarray
) -> np.ndarray:
    """Distances between starting points by original index; NaN markers map to 0."""
    from sortclust.metrics import batch_manhattan, batch_tanimoto

    if metric is DistanceKind.TANIMOTO:
        dists = batch_tanimoto(query_index, candidate_indices, data)
        return np.nan_to_num(dists, nan=0.0)
    return batch_manhattan(data.points, query_index, candidate_indices)
