"""Search-termination efficiency: pmf building blocks, exact model, simulation."""

import math

import numpy as np
import pytest

from sortclust.efficiency import (
    EfficiencyQuery,
    binomial_pmf,
    manhattan_pruning_efficiency,
    score_pmf,
    search_efficiency,
    similarity_probability,
    simulate_efficiency,
    window_probability,
)
from sortclust.errors import InvalidInputError


class TestBinomialPmf:
    def test_zero_successes_at_p_zero(self):
        assert binomial_pmf(0, 17, 0.0) == 1.0

    def test_single_trial(self):
        assert binomial_pmf(1, 1, 0.5) == 0.5

    def test_normalization(self):
        total = math.fsum(binomial_pmf(k, 20, 0.3) for k in range(21))
        assert abs(total - 1.0) <= 1e-12

    def test_large_n_no_overflow(self):
        value = binomial_pmf(50_000, 100_000, 0.5)
        assert 0.002 < value < 0.003  # ~ 1 / sqrt(pi * n / 2)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            binomial_pmf(5, 4, 0.5)
        with pytest.raises(InvalidInputError):
            binomial_pmf(1, 4, 1.5)


class TestScorePmf:
    def test_no_flips_concentrates_at_alpha(self):
        assert score_pmf(30, 30, 100, 0.0) == 1.0
        assert score_pmf(29, 30, 100, 0.0) == 0.0
        assert score_pmf(31, 30, 100, 0.0) == 0.0

    def test_normalization(self):
        total = math.fsum(score_pmf(k, 30, 100, 0.05) for k in range(101))
        assert abs(total - 1.0) <= 1e-10

    def test_normalization_high_dim(self):
        total = math.fsum(score_pmf(k, 500, 2000, 0.02) for k in range(2001))
        assert abs(total - 1.0) <= 1e-10

    def test_monte_carlo_oracle(self):
        # direct bit-flip simulation of P(pop-count = 29 | alpha 30, d 100)
        rng = np.random.default_rng(123)
        n, hits = 1_000_000, 0
        chunk = 100_000
        for _ in range(n // chunk):
            flips = rng.random((chunk, 100)) < 0.05
            scores = 30 - flips[:, :30].sum(axis=1) + flips[:, 30:].sum(axis=1)
            hits += int((scores == 29).sum())
        estimate = hits / n
        exact = score_pmf(29, 30, 100, 0.05)
        se = math.sqrt(exact * (1 - exact) / n)
        assert abs(estimate - exact) <= 3 * se


class TestWindowProbabilities:
    def test_subsum_property_random(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            d = int(rng.integers(20, 400))
            query = EfficiencyQuery(
                alpha_i=int(rng.integers(0, d + 1)),
                d=d,
                p=float(rng.uniform(0, 0.3)),
                s=float(rng.uniform(0.05, 0.95)),
            )
            result = search_efficiency(query)
            assert 0.0 <= result.p2 <= result.p1 <= 1.0 + 1e-12

    def test_no_flips_gives_perfect_efficiency(self):
        result = search_efficiency(EfficiencyQuery(alpha_i=80, d=200, p=0.0, s=0.7))
        assert result.p1 == 1.0
        assert result.p2 == 1.0
        assert result.efficiency == 1.0

    def test_loose_similarity_saturates(self):
        # low dispersion and a loose threshold: every admitted candidate is
        # truly similar, so the ratio rounds to exactly 1.0
        result = search_efficiency(EfficiencyQuery(alpha_i=500, d=1000, p=0.01, s=0.5))
        assert result.efficiency == 1.0

    def test_empty_window_is_undefined_marker(self):
        # p = 1 flips everything: the sample score is always d - alpha_i,
        # far outside the window, so p1 = 0 and the ratio is undefined
        result = search_efficiency(EfficiencyQuery(alpha_i=100, d=1000, p=1.0, s=0.9))
        assert result.p1 == 0.0
        assert result.efficiency is None

    def test_component_functions_agree(self):
        query = EfficiencyQuery(alpha_i=120, d=600, p=0.05, s=0.8)
        result = search_efficiency(query)
        assert window_probability(query) == result.p1
        assert similarity_probability(query) == result.p2


class TestSimulation:
    def test_p_zero_estimates_one(self):
        sim = simulate_efficiency(EfficiencyQuery(alpha_i=50, d=200, p=0.0, s=0.6), 500, 1)
        assert sim.estimate == 1.0
        assert sim.n_window == 500

    def test_deterministic_given_seed(self):
        query = EfficiencyQuery(alpha_i=100, d=1000, p=0.05, s=0.7)
        a = simulate_efficiency(query, 5000, 42)
        b = simulate_efficiency(query, 5000, 42)
        assert a == b

    def test_agrees_with_exact_model_on_grid(self):
        # alpha 100, d 1000: vary (p, s); the simulated ratio must sit within
        # three (null-model) standard errors of the exact efficiency
        seeds = np.random.SeedSequence(7).spawn(9)
        idx = 0
        for p in (0.01, 0.03, 0.05):
            for s in (0.5, 0.7, 0.85):
                query = EfficiencyQuery(alpha_i=100, d=1000, p=p, s=s)
                exact = search_efficiency(query).efficiency
                sim = simulate_efficiency(query, 20_000, seeds[idx])
                idx += 1
                if sim.estimate is None:
                    continue  # no sample landed in the window
                se = math.sqrt(exact * (1 - exact) / sim.n_window)
                assert abs(sim.estimate - exact) <= max(3 * se, 1e-12)

    def test_reported_std_error_formula(self):
        sim = simulate_efficiency(EfficiencyQuery(alpha_i=100, d=1000, p=0.05, s=0.7), 5000, 3)
        expected = math.sqrt(sim.estimate * (1 - sim.estimate) / sim.n_window)
        assert sim.std_error == expected


class TestManhattanPruningEfficiency:
    def test_zero_norm_is_one(self):
        for d in (1, 2, 10, 1000):
            assert manhattan_pruning_efficiency(0.7, 0.0, d) == 1.0

    def test_worked_value(self):
        assert manhattan_pruning_efficiency(1.0, 1.0, 2) == 0.25

    def test_decreasing_in_dimension(self):
        values = [manhattan_pruning_efficiency(1.0, 0.5, d) for d in range(1, 12)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            manhattan_pruning_efficiency(0.0, 1.0, 2)
        with pytest.raises(InvalidInputError):
            manhattan_pruning_efficiency(1.0, -1.0, 2)


class TestQueryValidation:
    def test_similarity_domain(self):
        with pytest.raises(InvalidInputError):
            EfficiencyQuery(alpha_i=10, d=100, p=0.1, s=1.0)
        with pytest.raises(InvalidInputError):
            EfficiencyQuery(alpha_i=10, d=100, p=0.1, s=0.0)

    def test_alpha_within_dimension(self):
        with pytest.raises(InvalidInputError):
            EfficiencyQuery(alpha_i=101, d=100, p=0.1, s=0.5)
