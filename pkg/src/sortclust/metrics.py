"""Exact distance kernels: Manhattan on reals, Tanimoto on bit-vectors.

The Tanimoto path keeps all arithmetic in integers (pop-counts and dot
products) until the final division, so batch and pointwise results agree
bit-for-bit. Radius comparisons that land within 1e-12 of the threshold are
re-decided in exact rational arithmetic, which makes the membership predicate
exact for every input.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from sortclust.errors import InvalidInputError, UndefinedDistanceError

if TYPE_CHECKING:
    from sortclust.data import FingerprintSet

# Width of the float fast-path band around the radius inside which the
# comparison is re-run exactly. Float evaluation of the distance is accurate
# to a few ulp (~1e-15), far inside this band.
_BOUNDARY_TOL = 1e-12


class DistanceKind(Enum):
    MANHATTAN = "manhattan"
    TANIMOTO = "tanimoto"


def manhattan_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Sum of absolute coordinate differences."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.abs(u - v).sum())


def tanimoto_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |u AND v| / |u OR v| on boolean vectors, by direct set counting.

    Raises UndefinedDistanceError when both vectors are all-zero; the
    clustering pipeline extends the metric there (identical empty vectors
    have distance 0) instead of calling this kernel.
    """
    u = np.asarray(u, dtype=bool)
    v = np.asarray(v, dtype=bool)
    if u.shape != v.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    union = int(np.count_nonzero(u | v))
    if union == 0:
        raise UndefinedDistanceError("Tanimoto distance of two all-zero vectors")
    inter = int(np.count_nonzero(u & v))
    return 1.0 - inter / union


def tanimoto_from_dot(dot: int, alpha_i: int, alpha_j: int) -> float:
    """Tanimoto distance from the dot product and the two pop-counts."""
    if not 0 <= dot <= min(alpha_i, alpha_j):
        raise InvalidInputError(
            f"dot product {dot} outside [0, min({alpha_i}, {alpha_j})]"
        )
    if alpha_i + alpha_j == 0:
        raise UndefinedDistanceError("Tanimoto distance of two all-zero vectors")
    return 1.0 - dot / (alpha_i + alpha_j - dot)


def batch_dot(fps: "FingerprintSet", query_index: int, candidates: np.ndarray) -> np.ndarray:
    """Pop-count of the AND between one row and many rows, over packed words."""
    q = fps.bits[query_index]
    return np.bitwise_count(fps.bits[candidates] & q).sum(axis=1, dtype=np.int64)


def batch_tanimoto(query_index: int, candidates: np.ndarray, fps: "FingerprintSet") -> np.ndarray:
    """Tanimoto distances from one fingerprint to many, exactly.

    Pairs where both vectors are all-zero get NaN as an undefined-distance
    marker; callers that need a total metric map it to 0 (identical empty
    vectors).
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    dots = batch_dot(fps, query_index, candidates)
    denom = fps.scores[query_index] + fps.scores[candidates] - dots
    out = np.full(candidates.shape, np.nan)
    ok = denom > 0
    out[ok] = 1.0 - dots[ok] / denom[ok]
    return out


def batch_manhattan(points: np.ndarray, query_index: int, candidates: np.ndarray) -> np.ndarray:
    """Manhattan distances from one point to many rows of ``points``.

    numpy's pairwise summation keeps the reduction order fixed per pair, so
    results do not depend on how callers split the candidate set.
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    return np.abs(points[candidates] - points[query_index]).sum(axis=1)


def tanimoto_within_radius(
    dots: np.ndarray, alpha_q: int, alphas: np.ndarray, radius: float
) -> np.ndarray:
    """Exact mask of pairs with Tanimoto distance <= radius.

    Evaluated in float with a 1e-12 boundary band re-decided via exact
    rational arithmetic. All-zero vs all-zero pairs count as within (distance
    0 under the pipeline's continuous extension).
    """
    dots = np.asarray(dots, dtype=np.int64)
    alphas = np.asarray(alphas, dtype=np.int64)
    denom = alpha_q + alphas - dots
    numer = denom - dots  # symmetric-difference size; distance = numer/denom
    within = np.ones(dots.shape, dtype=bool)
    ok = denom > 0
    dist = numer[ok] / denom[ok]
    within[ok] = dist <= radius
    boundary = np.zeros(dots.shape, dtype=bool)
    boundary[ok] = np.abs(dist - radius) <= _BOUNDARY_TOL
    if boundary.any():
        radius_exact = Fraction(radius)
        for idx in np.nonzero(boundary)[0]:
            within[idx] = Fraction(int(numer[idx]), int(denom[idx])) <= radius_exact
    return within
