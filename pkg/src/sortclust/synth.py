"""Reproducible synthetic fingerprint clusters.

Each cluster is a seed bit-vector plus k noisy copies obtained by XOR-ing the
seed with independent Bernoulli flip masks. Output order is fixed (seed 0,
its k samples, seed 1, ...) and every vector comes from its own child RNG
stream, so the dataset is bit-identical across platforms and thread counts.

Stream-splitting rule: SeedSequence(rng_seed) spawns one child per cluster;
cluster child c spawns k + 1 grandchildren, the first for cluster c's seed
vector and the remaining k for its flip masks, in sample order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sortclust.data import FingerprintSet
from sortclust.errors import InvalidSpecError

FLIP_SCALE = 0.1  # scaled mode: flip probability = FLIP_SCALE * seed_score / d


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic dataset.

    flip_mode "scaled" derives each cluster's flip probability from its seed
    score (FLIP_SCALE * score / d); "fixed" uses flip_p for every cluster.
    seed_scores "random" draws each seed bit by fair coin; "arithmetic" gives
    cluster c a seed of exactly alpha_min + c * beta set bits at uniformly
    random positions.
    """

    num_clusters: int
    k: int
    d: int
    flip_mode: str = "scaled"
    flip_p: float | None = None
    seed_scores: str = "random"
    alpha_min: int | None = None
    beta: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_clusters < 1:
            raise InvalidSpecError("num_clusters must be at least 1")
        if self.k < 0:
            raise InvalidSpecError("k must be nonnegative")
        if self.d < 1:
            raise InvalidSpecError("d must be positive")
        if self.flip_mode not in ("scaled", "fixed"):
            raise InvalidSpecError(f"unknown flip_mode: {self.flip_mode!r}")
        if self.flip_mode == "fixed":
            if self.flip_p is None or not 0 <= self.flip_p <= 1:
                raise InvalidSpecError("fixed flip_mode requires flip_p in [0, 1]")
        if self.seed_scores not in ("random", "arithmetic"):
            raise InvalidSpecError(f"unknown seed_scores: {self.seed_scores!r}")
        if self.seed_scores == "arithmetic":
            if self.alpha_min is None or self.beta is None:
                raise InvalidSpecError("arithmetic seed_scores requires alpha_min and beta")
            if self.alpha_min < 0 or self.beta < 0:
                raise InvalidSpecError("alpha_min and beta must be nonnegative")
            top = self.alpha_min + (self.num_clusters - 1) * self.beta
            if top > self.d:
                raise InvalidSpecError(
                    f"largest seed score {top} exceeds dimension {self.d}"
                )

    @property
    def n(self) -> int:
        return self.num_clusters * (self.k + 1)


def flip_mask(d: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask with each bit independently set with probability p."""
    if not 0 <= p <= 1:
        raise InvalidSpecError(f"flip probability {p} outside [0, 1]")
    return rng.random(d) < p


def _seed_vector(spec: SynthSpec, cluster: int, rng: np.random.Generator) -> np.ndarray:
    if spec.seed_scores == "arithmetic":
        score = spec.alpha_min + cluster * spec.beta
        row = np.zeros(spec.d, dtype=bool)
        row[rng.choice(spec.d, size=score, replace=False)] = True
        return row
    return rng.integers(0, 2, size=spec.d, dtype=np.uint8).astype(bool)


def generate(spec: SynthSpec) -> tuple[FingerprintSet, np.ndarray]:
    """Produce the dataset and its ground-truth labels (one label per seed)."""
    root = np.random.SeedSequence(spec.rng_seed)
    cluster_seqs = root.spawn(spec.num_clusters)
    rows = np.empty((spec.n, spec.d), dtype=bool)
    labels = np.empty(spec.n, dtype=np.int64)
    pos = 0
    for c in range(spec.num_clusters):
        streams = cluster_seqs[c].spawn(spec.k + 1)
        seed_rng = np.random.Generator(np.random.PCG64(streams[0]))
        seed_row = _seed_vector(spec, c, seed_rng)
        if spec.flip_mode == "scaled":
            p = FLIP_SCALE * int(seed_row.sum()) / spec.d
        else:
            p = spec.flip_p
        rows[pos] = seed_row
        labels[pos] = c
        pos += 1
        for j in range(spec.k):
            mask_rng = np.random.Generator(np.random.PCG64(streams[j + 1]))
            rows[pos] = seed_row ^ flip_mask(spec.d, p, mask_rng)
            labels[pos] = c
            pos += 1
    return FingerprintSet.from_bool_matrix(rows), labels
