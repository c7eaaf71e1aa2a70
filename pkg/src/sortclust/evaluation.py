"""Clustering quality scoring via the Adjusted Rand Index.

Pair counts are kept as exact Python integers (no overflow at any n); only
the final ratio is floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sortclust.errors import InvalidInputError


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # counts[u, v] = points with true label u, predicted label v
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int

    @classmethod
    def from_labels(cls, labels_true, labels_pred) -> "ContingencyTable":
        labels_true = np.asarray(labels_true)
        labels_pred = np.asarray(labels_pred)
        if labels_true.shape != labels_pred.shape or labels_true.ndim != 1:
            raise InvalidInputError("label arrays must be 1-d and of equal length")
        if labels_true.size < 2:
            raise InvalidInputError("need at least two points to compare partitions")
        _, ti = np.unique(labels_true, return_inverse=True)
        _, pi = np.unique(labels_pred, return_inverse=True)
        n_rows = int(ti.max()) + 1
        n_cols = int(pi.max()) + 1
        flat = np.bincount(ti * n_cols + pi, minlength=n_rows * n_cols)
        counts = flat.reshape(n_rows, n_cols)
        return cls(
            counts=counts,
            row_marginals=counts.sum(axis=1),
            col_marginals=counts.sum(axis=0),
            n=int(labels_true.size),
        )


def _comb2(values) -> int:
    return sum(int(v) * (int(v) - 1) // 2 for v in values)


def adjusted_rand_index(labels_true, labels_pred) -> float:
    """Chance-corrected partition agreement in [-1, 1].

    Invariant under relabeling of either side; 1 exactly iff the partitions
    are identical.
    """
    table = ContingencyTable.from_labels(labels_true, labels_pred)
    index = _comb2(table.counts.ravel())
    sum_rows = _comb2(table.row_marginals)
    sum_cols = _comb2(table.col_marginals)
    total = table.n * (table.n - 1) // 2
    # ARI = (index - expected) / (max_index - expected) with
    # expected = sum_rows * sum_cols / total; cleared of denominators below.
    numerator = 2 * (total * index - sum_rows * sum_cols)
    denominator = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols
    if denominator == 0:
        # Both partitions are all-singletons or both single-cluster: identical.
        return 1.0
    return numerator / denominator
