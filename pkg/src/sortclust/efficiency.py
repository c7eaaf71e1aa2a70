"""Exact and simulated efficiency of the score-based search termination.

For the Tanimoto path, a cluster is modelled as Bernoulli(p) bit flips of a
seed with pop-count alpha_i. Candidates admitted by the score window
[alpha_i * s, alpha_i / s] (similarity threshold s = 1 - radius) split into
those that truly have similarity >= s and those over-admitted; the efficiency
is the probability of the former given the window. Window bounds and the
flip-count cap that characterizes similarity >= s are evaluated in exact
rational arithmetic, so the closed-form model and the bit-level simulation
measure exactly the same event.

For the Manhattan path, the same question under uniformly distributed
coordinates reduces to a ratio of diamond volumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom

from sortclust.errors import InvalidInputError

_SIM_CHUNK = 8192  # samples per simulation batch; fixed so streams never depend on n


@dataclass(frozen=True)
class EfficiencyQuery:
    """One grid point: seed score alpha_i, dimension d, flip probability p,
    similarity threshold s in (0, 1)."""

    alpha_i: int
    d: int
    p: float
    s: float

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise InvalidInputError(f"similarity threshold s={self.s} outside (0, 1)")
        if not 0 <= self.p <= 1:
            raise InvalidInputError(f"flip probability p={self.p} outside [0, 1]")
        if not 0 <= self.alpha_i <= self.d:
            raise InvalidInputError(
                f"seed score {self.alpha_i} outside [0, {self.d}]"
            )


@dataclass(frozen=True)
class EfficiencyResult:
    query: EfficiencyQuery
    p1: float
    p2: float
    efficiency: float | None  # None when p1 == 0 (undefined, not zero)


@dataclass(frozen=True)
class SimulationResult:
    estimate: float | None  # None when no sample landed in the score window
    std_error: float | None
    n_window: int
    n_samples: int


@dataclass(frozen=True)
class EfficiencyPoint:
    """One row of an efficiency curve; simulation fields are None in exact mode."""

    query: EfficiencyQuery
    p1: float
    p2: float
    efficiency: float | None
    simulated: float | None = None
    std_error: float | None = None
    n_sim: int = 0


def binomial_pmf(k: int, n: int, p: float) -> float:
    """Probability of exactly k successes in n Bernoulli(p) trials.

    Backed by scipy's log-space evaluation; stable for n up to 1e5 and more.
    """
    if not 0 <= k <= n:
        raise InvalidInputError(f"k={k} outside [0, {n}]")
    if not 0 <= p <= 1:
        raise InvalidInputError(f"p={p} outside [0, 1]")
    return float(binom.pmf(k, n, p))


def score_pmf(k: int, alpha_i: int, d: int, p: float) -> float:
    """Probability that a Bernoulli(p) flip of a score-alpha_i seed has pop-count k.

    Sums over the number of 1-bits flipped off (ell); the matching number of
    0-bits flipped on is then k + ell - alpha_i.
    """
    if not 0 <= k <= d:
        raise InvalidInputError(f"k={k} outside [0, {d}]")
    if not 0 <= alpha_i <= d:
        raise InvalidInputError(f"alpha_i={alpha_i} outside [0, {d}]")
    if not 0 <= p <= 1:
        raise InvalidInputError(f"p={p} outside [0, 1]")
    ells = np.arange(max(0, alpha_i - k), alpha_i + 1)
    gains = k + ells - alpha_i
    valid = gains <= d - alpha_i
    ells, gains = ells[valid], gains[valid]
    if ells.size == 0:
        return 0.0
    terms = binom.pmf(ells, alpha_i, p) * binom.pmf(gains, d - alpha_i, p)
    return math.fsum(terms)


def _score_window(alpha_i: int, s: float, d: int) -> tuple[int, int]:
    """Integer pop-count window [ceil(alpha_i * s), floor(alpha_i / s)] ∩ [0, d].

    Bounds are taken in exact rational arithmetic on the float value of s, so
    no boundary score is ever mis-rounded in or out.
    """
    s_exact = Fraction(s)
    lo = math.ceil(alpha_i * s_exact)
    hi = math.floor(alpha_i / s_exact)
    return max(lo, 0), min(hi, d)


def _flip_cap(alpha_i: int, s: float, k: int) -> int:
    """Largest number of dropped 1-bits still giving similarity >= s at pop-count k.

    similarity = (alpha_i - ell) / (k + ell) >= s  <=>  ell <= (alpha_i - s*k) / (1 + s).
    """
    s_exact = Fraction(s)
    return math.floor((alpha_i - s_exact * k) / (1 + s_exact))


def _window_probabilities(query: EfficiencyQuery) -> tuple[float, float]:
    """(p1, p2): probability of the score window, and of true similarity >= s.

    Terms are accumulated in ascending (k, ell) order with compensated
    summation.
    """
    alpha_i, d, p, s = query.alpha_i, query.d, query.p, query.s
    k_lo, k_hi = _score_window(alpha_i, s, d)
    if k_lo > k_hi:
        return 0.0, 0.0
    pmf_drop = binom.pmf(np.arange(alpha_i + 1), alpha_i, p)
    pmf_gain = binom.pmf(np.arange(d - alpha_i + 1), d - alpha_i, p)
    terms1: list[float] = []
    terms2: list[float] = []
    for k in range(k_lo, k_hi + 1):
        lo = max(0, alpha_i - k)
        ells = np.arange(lo, alpha_i + 1)
        gains = k + ells - alpha_i
        valid = gains <= d - alpha_i
        ells, gains = ells[valid], gains[valid]
        if ells.size == 0:
            continue
        probs = pmf_drop[ells] * pmf_gain[gains]
        terms1.extend(probs)
        cap = _flip_cap(alpha_i, s, k)
        if cap >= lo:
            terms2.extend(probs[ells <= cap])
    return math.fsum(terms1), math.fsum(terms2)


def window_probability(query: EfficiencyQuery) -> float:
    """P1: probability that a flipped sample's pop-count lands in the score window."""
    return _window_probabilities(query)[0]


def similarity_probability(query: EfficiencyQuery) -> float:
    """P2: probability that a flipped sample has Tanimoto similarity >= s."""
    return _window_probabilities(query)[1]


def search_efficiency(query: EfficiencyQuery) -> EfficiencyResult:
    """Efficiency p2 / p1 of the score-window termination; None when p1 = 0."""
    p1, p2 = _window_probabilities(query)
    efficiency = p2 / p1 if p1 > 0 else None
    return EfficiencyResult(query=query, p1=p1, p2=p2, efficiency=efficiency)


def simulate_efficiency(
    query: EfficiencyQuery, n_samples: int, rng_seed: int | np.random.SeedSequence
) -> SimulationResult:
    """Estimate the efficiency by generating actual flipped bit-vectors.

    The estimate is #(in window and similarity >= s) / #(in window); the
    standard error uses the binomial approximation sqrt(e(1-e)/m) over the
    m in-window samples.
    """
    if n_samples < 1:
        raise InvalidInputError("n_samples must be at least 1")
    alpha_i, d, p, s = query.alpha_i, query.d, query.p, query.s
    k_lo, k_hi = _score_window(alpha_i, s, d)
    caps = np.array(
        [_flip_cap(alpha_i, s, k) for k in range(k_lo, k_hi + 1)], dtype=np.int64
    ) if k_hi >= k_lo else np.zeros(0, dtype=np.int64)

    rng = np.random.default_rng(rng_seed)
    n_window = 0
    n_hit = 0
    remaining = n_samples
    while remaining > 0:
        m = min(_SIM_CHUNK, remaining)
        remaining -= m
        flips = rng.random((m, d)) < p
        samples = flips.copy()
        samples[:, :alpha_i] = ~samples[:, :alpha_i]  # sample = seed XOR mask
        alpha_j = samples.sum(axis=1, dtype=np.int64)
        dropped = alpha_i - samples[:, :alpha_i].sum(axis=1, dtype=np.int64)
        in_window = (alpha_j >= k_lo) & (alpha_j <= k_hi)
        if caps.size:
            idx = np.clip(alpha_j - k_lo, 0, caps.size - 1)
            hit = in_window & (dropped <= caps[idx])
        else:
            hit = np.zeros(m, dtype=bool)
        n_window += int(in_window.sum())
        n_hit += int(hit.sum())

    if n_window == 0:
        return SimulationResult(None, None, 0, n_samples)
    estimate = n_hit / n_window
    std_error = math.sqrt(estimate * (1.0 - estimate) / n_window)
    return SimulationResult(estimate, std_error, n_window, n_samples)


def manhattan_pruning_efficiency(radius: float, alpha_u: float, d: int) -> float:
    """Volume ratio (radius / (radius + alpha_u))**d of the target diamond to
    the score-window diamond, under uniformly distributed coordinates."""
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    if alpha_u < 0:
        raise InvalidInputError("alpha_u must be nonnegative")
    if d < 1:
        raise InvalidInputError("d must be at least 1")
    return (radius / (radius + alpha_u)) ** d


def evaluate_grid(
    alpha_list: list[int],
    p_list: list[float],
    s_list: list[float],
    d: int,
    mode: str = "exact",
    n_samples: int = 100_000,
    rng_seed: int = 0,
) -> list[EfficiencyPoint]:
    """Evaluate all (alpha_i, p, s) combinations; rows in grid iteration order.

    Each simulated row draws from its own child stream of rng_seed, so single
    rows can be reproduced independently of grid shape.
    """
    if mode not in ("exact", "simulate", "both"):
        raise InvalidInputError(f"unknown mode: {mode!r}")
    queries = [
        EfficiencyQuery(alpha_i=a, d=d, p=p, s=s)
        for a in alpha_list
        for p in p_list
        for s in s_list
    ]
    seeds = np.random.SeedSequence(rng_seed).spawn(len(queries))
    points: list[EfficiencyPoint] = []
    for query, seq in zip(queries, seeds):
        p1 = p2 = float("nan")
        efficiency = None
        if mode in ("exact", "both"):
            result = search_efficiency(query)
            p1, p2, efficiency = result.p1, result.p2, result.efficiency
        simulated = std_error = None
        n_sim = 0
        if mode in ("simulate", "both"):
            sim = simulate_efficiency(query, n_samples, seq)
            simulated, std_error, n_sim = sim.estimate, sim.std_error, sim.n_samples
        points.append(
            EfficiencyPoint(
                query=query,
                p1=p1,
                p2=p2,
                efficiency=efficiency,
                simulated=simulated,
                std_error=std_error,
                n_sim=n_sim,
            )
        )
    return points
