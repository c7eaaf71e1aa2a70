"""Core dataset containers: dense real-valued points and bit-packed fingerprints.

Both containers are immutable after construction (backing arrays are marked
read-only) so they can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sortclust.errors import InvalidInputError

WORD_BITS = 64


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Pack a boolean (n, d) matrix into little-endian uint64 words.

    Bit j of a vector lands in word j // 64 at position j % 64. The final
    partial word is zero-padded.
    """
    rows = np.asarray(rows, dtype=bool)
    if rows.ndim != 2:
        raise InvalidInputError("expected a 2-d boolean matrix")
    n, d = rows.shape
    packed8 = np.packbits(rows, axis=1, bitorder="little")
    n_words = max(1, (d + WORD_BITS - 1) // WORD_BITS)
    padded = np.zeros((n, n_words * 8), dtype=np.uint8)
    padded[:, : packed8.shape[1]] = packed8
    return np.ascontiguousarray(padded).view("<u8")


def unpack_rows(words: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`; returns a boolean (n, d) matrix."""
    raw = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(raw, axis=1, bitorder="little", count=d)
    return bits.astype(bool)


@dataclass(frozen=True)
class DenseDataset:
    """n real-valued points of dimension d, optionally orthant-shifted.

    ``shift`` records the translation already applied to ``points``; when it
    is set, every stored entry is nonnegative and ``points + shift`` recovers
    the original coordinates.
    """

    points: np.ndarray
    shift: np.ndarray | None = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] == 0:
            raise InvalidInputError("dense dataset must be a non-empty 2-d matrix")
        if not np.isfinite(points).all():
            raise InvalidInputError("dense dataset contains non-finite entries")
        points = np.ascontiguousarray(points)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        if self.shift is not None:
            shift = np.asarray(self.shift, dtype=np.float64)
            if shift.shape != (points.shape[1],):
                raise InvalidInputError("shift vector dimension mismatch")
            if (points < 0).any():
                raise InvalidInputError("shifted dataset has negative entries")
            shift.setflags(write=False)
            object.__setattr__(self, "shift", shift)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class FingerprintSet:
    """n binary vectors of dimension d, packed into 64-bit words.

    ``scores[i]`` caches the pop-count of row i and is revalidated against a
    naive per-bit count at construction time.
    """

    bits: np.ndarray
    scores: np.ndarray
    d: int

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits)
        scores = np.asarray(self.scores, dtype=np.int64)
        if bits.ndim != 2 or bits.shape[0] == 0:
            raise InvalidInputError("fingerprint set must be non-empty")
        if self.d <= 0:
            raise InvalidInputError("fingerprint dimension must be positive")
        bits.setflags(write=False)
        scores.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "scores", scores)
        naive = unpack_rows(bits, self.d).sum(axis=1, dtype=np.int64)
        if not np.array_equal(naive, scores):
            raise InvalidInputError("stored pop-counts disagree with per-bit counts")

    @classmethod
    def from_bool_matrix(cls, rows: np.ndarray) -> "FingerprintSet":
        rows = np.asarray(rows, dtype=bool)
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
            raise InvalidInputError("fingerprint matrix must be non-empty and 2-d")
        words = pack_rows(rows)
        scores = rows.sum(axis=1, dtype=np.int64)
        return cls(bits=words, scores=scores, d=rows.shape[1])

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def row(self, i: int) -> np.ndarray:
        """Row i as a boolean vector of length d."""
        return unpack_rows(self.bits[i : i + 1], self.d)[0]

    def to_bool_matrix(self) -> np.ndarray:
        return unpack_rows(self.bits, self.d)


@dataclass(frozen=True)
class ScoredOrder:
    """Sort permutation and the nondecreasing score sequence it induces.

    Ties are broken by ascending original index, so the ordering is a pure
    function of the data.
    """

    perm: np.ndarray
    sorted_scores: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        sorted_scores = np.asarray(self.sorted_scores)
        perm.setflags(write=False)
        sorted_scores.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "sorted_scores", sorted_scores)

    @property
    def n(self) -> int:
        return self.perm.shape[0]


def orthant_shift(dataset: DenseDataset) -> tuple[DenseDataset, np.ndarray]:
    """Translate all points by the component-wise minimum.

    Every coordinate of the returned dataset is nonnegative and all pairwise
    Manhattan distances are unchanged; the sharper norm gaps this produces
    shrink the aggregation search windows on average.
    """
    if dataset.shift is not None:
        raise InvalidInputError("dataset is already shifted")
    shift = dataset.points.min(axis=0)
    shifted = DenseDataset(points=dataset.points - shift, shift=shift)
    return shifted, shift


def manhattan_scores(points: np.ndarray) -> np.ndarray:
    return np.abs(points).sum(axis=1)


def score_and_sort(data: DenseDataset | FingerprintSet) -> ScoredOrder:
    """Score every point (Manhattan norm or pop-count) and sort ascending.

    The returned permutation is stable: equal scores keep their original
    index order.
    """
    if isinstance(data, FingerprintSet):
        scores = data.scores
    elif isinstance(data, DenseDataset):
        scores = manhattan_scores(data.points)
    else:
        raise InvalidInputError(f"unsupported dataset type: {type(data).__name__}")
    perm = np.argsort(scores, kind="stable")
    return ScoredOrder(perm=perm, sorted_scores=scores[perm])
