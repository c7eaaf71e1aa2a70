"""Provenance graph over clustering decisions and path-based explanations.

Group membership is stored as a star (member -- starting point), merge and
redistribution decisions as starting-point edges. The connected components of
the surviving edges equal the final clusters exactly, so "why are i and j
together" reduces to a shortest path in this graph, each hop carrying the
distance that justified the decision.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from sortclust.aggregation import AggregationResult
from sortclust.errors import InternalInvariantError, InvalidInputError
from sortclust.merging import MergeResult, MinPtsResult

KIND_AGGREGATION = "aggregation"
KIND_MERGE = "merge"
KIND_MINPTS = "minpts-reassignment"

_HOP_VERB = {
    KIND_AGGREGATION: "joined-group-of",
    KIND_MERGE: "merged-with",
    KIND_MINPTS: "reassigned-to",
}


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    kind: str
    distance: float


@dataclass(frozen=True)
class Hop:
    src: int
    dst: int
    kind: str
    distance: float

    def text(self) -> str:
        return f"{self.src} -[{_HOP_VERB[self.kind]}, {self.distance:.6g}]-> {self.dst}"

    def record(self) -> dict:
        return {
            "from": self.src,
            "to": self.dst,
            "kind": _HOP_VERB[self.kind],
            "distance": self.distance,
        }


@dataclass(frozen=True)
class Explanation:
    index_a: int
    index_b: int
    cluster_a: int
    cluster_b: int
    path: tuple[Hop, ...] | None  # None when the points are in different clusters

    @property
    def same_cluster(self) -> bool:
        return self.path is not None

    def text_lines(self) -> list[str]:
        if self.path is None:
            return [
                f"verdict: different clusters "
                f"({self.index_a} in cluster {self.cluster_a}, "
                f"{self.index_b} in cluster {self.cluster_b})"
            ]
        lines = [hop.text() for hop in self.path]
        lines.append(
            f"verdict: same cluster {self.cluster_a} "
            f"({len(self.path)} hop{'s' if len(self.path) != 1 else ''})"
        )
        return lines

    def machine_lines(self) -> list[str]:
        records = [hop.record() for hop in self.path] if self.path is not None else []
        records.append(
            {
                "verdict": "same" if self.same_cluster else "different",
                "index_a": self.index_a,
                "index_b": self.index_b,
                "cluster_a": self.cluster_a,
                "cluster_b": self.cluster_b,
                "hops": len(self.path) if self.path is not None else None,
            }
        )
        return [json.dumps(r, sort_keys=True) for r in records]


class ExplainGraph:
    """Union of aggregation stars, surviving merge edges, and redistribution edges."""

    def __init__(
        self,
        n: int,
        a1_edges: tuple[Edge, ...],
        a2_edges: tuple[Edge, ...],
        group_of_point: np.ndarray,
        starting_points: np.ndarray,
        labels: np.ndarray,
    ):
        self.n = n
        self.a1_edges = a1_edges
        self.a2_edges = a2_edges
        self.group_of_point = group_of_point
        self.starting_points = starting_points
        self.labels = labels
        self._sp_set = frozenset(int(s) for s in starting_points)
        adjacency: list[list[tuple[int, str, float]]] = [[] for _ in range(n)]
        for edge in (*a1_edges, *a2_edges):
            adjacency[edge.u].append((edge.v, edge.kind, edge.distance))
            adjacency[edge.v].append((edge.u, edge.kind, edge.distance))
        for neighbors in adjacency:
            neighbors.sort()  # ascending node index: deterministic BFS tie-breaks
        self.adjacency = adjacency

    def is_starting_point(self, i: int) -> bool:
        return int(i) in self._sp_set


def build_explain_graph(
    agg: AggregationResult,
    merge: MergeResult,
    minpts: MinPtsResult,
    labels: np.ndarray,
) -> ExplainGraph:
    n = len(agg.group_label)
    sp = agg.starting_points
    a1: list[Edge] = []
    for p in range(n):
        start = int(sp[agg.group_label[p]])
        if p != start:
            a1.append(Edge(start, p, KIND_AGGREGATION, float(agg.dist_to_start[p])))
    for idx, e in enumerate(merge.merge_edges):
        if idx in minpts.removed_merge_edges:
            continue
        a1.append(Edge(int(sp[e.group_a]), int(sp[e.group_b]), KIND_MERGE, e.distance))
    a2 = tuple(
        Edge(int(sp[r.group]), r.target_starting_point, KIND_MINPTS, r.distance)
        for r in minpts.reassignment_log
    )
    return ExplainGraph(
        n=n,
        a1_edges=tuple(a1),
        a2_edges=a2,
        group_of_point=agg.group_label.copy(),
        starting_points=sp.copy(),
        labels=np.asarray(labels).copy(),
    )


def explain_pair(graph: ExplainGraph, i: int, j: int) -> Explanation:
    """Shortest decision path between two points, or a different-clusters verdict."""
    n = graph.n
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"indices must lie in 0..{n - 1}")
    cluster_i = int(graph.labels[i])
    cluster_j = int(graph.labels[j])
    if cluster_i != cluster_j:
        return Explanation(i, j, cluster_i, cluster_j, None)
    if i == j:
        return Explanation(i, j, cluster_i, cluster_j, ())

    # Breadth-first search with ascending-index neighbor order.
    parent: dict[int, tuple[int, str, float]] = {}
    seen = {i}
    queue = deque([i])
    while queue:
        node = queue.popleft()
        if node == j:
            break
        for neighbor, kind, distance in graph.adjacency[node]:
            if neighbor not in seen:
                seen.add(neighbor)
                parent[neighbor] = (node, kind, distance)
                queue.append(neighbor)
    if j not in parent:
        raise InternalInvariantError(
            f"points {i} and {j} share a cluster label but are not connected "
            "in the explain graph"
        )
    hops: list[Hop] = []
    node = j
    while node != i:
        prev, kind, distance = parent[node]
        hops.append(Hop(prev, node, kind, distance))
        node = prev
    hops.reverse()
    return Explanation(i, j, cluster_i, cluster_j, tuple(hops))
