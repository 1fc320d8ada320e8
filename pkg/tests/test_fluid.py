import math

import numpy as np
import pytest

from playout.fluid import (
    Exponential,
    FluidScenario,
    LogNormal,
    Pareto,
    fluid_starvation_probability,
    match_means,
    no_starvation_horizon,
)

from oracles import erf_reference


class TestHorizon:
    def test_no_refill_drains_exactly_the_threshold(self):
        scn = FluidScenario(lam=0.0, mu=1.0, threshold=17)
        assert no_starvation_horizon(scn) == 17.0

    def test_direct_substitution(self):
        scn = FluidScenario(lam=0.5, mu=1.0, threshold=10)
        assert no_starvation_horizon(scn) == pytest.approx(20.0, rel=1e-14)

    def test_balanced_rates_never_starve(self):
        scn = FluidScenario(lam=1.0, mu=1.0, threshold=5)
        assert no_starvation_horizon(scn) == math.inf
        for dist in (Exponential(1e-3), Pareto(10, 1.5), LogNormal(5.0, 2.0)):
            assert fluid_starvation_probability(scn, dist) == 0.0

    def test_unstable_rates_rejected(self):
        with pytest.raises(ValueError):
            FluidScenario(lam=2.0, mu=1.0, threshold=5)

    def test_large_horizon_matches_sampled_tail(self):
        scn = FluidScenario(lam=0.95, mu=1.0, threshold=90)
        horizon = no_starvation_horizon(scn)
        assert horizon == pytest.approx(1800.0, rel=1e-12)
        dist = Exponential(1.0 / 2000.0)
        rng = np.random.default_rng(5)
        draws = dist.sample(rng, 1_000_000)
        frac = float(np.mean(draws > horizon))
        want = fluid_starvation_probability(scn, dist)
        se = math.sqrt(want * (1 - want) / 1_000_000)
        assert abs(frac - want) < 3 * se


class TestClosedForms:
    def test_exponential_form(self):
        scn = FluidScenario(lam=0.8, mu=1.0, threshold=30)
        dist = Exponential(1.0 / 500.0)
        want = math.exp(-30.0 * 1.0 / (1.0 - 0.8) / 500.0)
        assert fluid_starvation_probability(scn, dist) == pytest.approx(want, rel=1e-12)

    def test_pareto_clamps_below_minimum_size(self):
        dist = Pareto(n_m=300.0, upsilon=1.5)
        # horizon below the minimum possible size: starvation is certain
        scn = FluidScenario(lam=0.95, mu=1.0, threshold=10)
        assert fluid_starvation_probability(scn, dist) == 1.0
        # continuous at the junction
        scn_eq = FluidScenario(lam=0.95, mu=1.0, threshold=15)  # horizon exactly 300
        assert no_starvation_horizon(scn_eq) == pytest.approx(300.0, rel=1e-12)
        assert fluid_starvation_probability(scn_eq, dist) == pytest.approx(1.0, rel=1e-12)
        just_above = dist.tail(300.0 * (1 + 1e-9))
        assert just_above == pytest.approx(1.0, rel=1e-6)

    def test_lognormal_form(self):
        scn = FluidScenario(lam=0.5, mu=1.0, threshold=50)  # horizon 100
        dist = LogNormal(varrho=5.0, sigma=2.0)
        want = 0.5 - 0.5 * math.erf((math.log(100.0) - 5.0) / (math.sqrt(2.0) * 2.0))
        assert fluid_starvation_probability(scn, dist) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize(
        "dist",
        [Exponential(1 / 2000), Pareto(300.0, 1.5), LogNormal(5.0, 2.2807)],
    )
    def test_monotone_in_threshold(self, dist):
        probs = [
            fluid_starvation_probability(FluidScenario(lam=0.95, mu=1.0, threshold=x1), dist)
            for x1 in range(5, 200, 5)
        ]
        assert all(b <= a + 1e-15 for a, b in zip(probs, probs[1:]))

    def test_huge_threshold_kills_starvation(self):
        scn = FluidScenario(lam=0.95, mu=1.0, threshold=10_000_000)
        for dist in (Exponential(1 / 2000), Pareto(300.0, 1.2), LogNormal(5.0, 2.28)):
            assert fluid_starvation_probability(scn, dist) < 1e-6


class TestMatchMeans:
    def test_pareto_exponent_from_minimum(self):
        dist = match_means(2000.0, "pareto", n_m=300.0)
        assert dist.upsilon == pytest.approx(2000.0 / 1700.0, rel=1e-12)
        assert dist.mean() == pytest.approx(2000.0, rel=1e-12)

    def test_lognormal_spread_from_location(self):
        dist = match_means(2000.0, "lognormal", varrho=5.0)
        assert dist.sigma == pytest.approx(math.sqrt(2.0 * (math.log(2000.0) - 5.0)), rel=1e-12)
        assert dist.mean() == pytest.approx(2000.0, rel=1e-12)

    def test_exponential_rate_is_reciprocal_mean(self):
        dist = match_means(1234.0, "exp")
        assert dist.theta == pytest.approx(1.0 / 1234.0, rel=1e-15)

    def test_solving_the_other_way(self):
        pareto = match_means(2000.0, "pareto", upsilon=1.25)
        assert pareto.mean() == pytest.approx(2000.0, rel=1e-12)
        lognormal = match_means(2000.0, "lognormal", sigma=1.5)
        assert lognormal.mean() == pytest.approx(2000.0, rel=1e-12)

    def test_unsolvable_constraints_rejected(self):
        with pytest.raises(ValueError):
            match_means(2000.0, "pareto", n_m=2000.0)
        with pytest.raises(ValueError):
            match_means(2000.0, "pareto", n_m=2500.0)
        with pytest.raises(ValueError):
            match_means(100.0, "lognormal", varrho=math.log(100.0))
        with pytest.raises(ValueError):
            match_means(100.0, "unknown-family")
        with pytest.raises(ValueError):
            match_means(100.0, "pareto")


class TestErfAccuracy:
    @pytest.mark.parametrize("x", [-5.5, -3.0, -1.2, -0.3, 0.0, 0.17, 0.9, 2.4, 4.8, 6.0])
    def test_matches_high_precision_series(self, x):
        assert math.erf(x) == pytest.approx(erf_reference(x), abs=1e-12)


class TestSampling:
    def test_sample_means_track_distribution_means(self):
        rng = np.random.default_rng(11)
        for dist in (
            Exponential(1 / 800),
            match_means(2000.0, "pareto", n_m=300.0),
            match_means(2000.0, "lognormal", varrho=5.0),
        ):
            draws = dist.sample(rng, 400_000)
            # heavy-tailed families converge slowly: generous bands
            assert float(np.mean(draws)) == pytest.approx(dist.mean(), rel=0.15)

    def test_pareto_draws_respect_minimum(self):
        rng = np.random.default_rng(3)
        draws = Pareto(300.0, 1.4).sample(rng, 10_000)
        assert float(draws.min()) >= 300.0
