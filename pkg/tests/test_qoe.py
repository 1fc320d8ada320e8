import math

import pytest

from playout.core import QueueParams
from playout.qoe import (
    QoeWeights,
    cost_finite,
    lambert_w0,
    optimize_file_level,
    optimize_finite,
    optimize_infinite_subcritical,
    optimize_infinite_supercritical,
)

from oracles import golden_section


class TestLambertW:
    def test_fixed_points(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize(
        "x", [-1 / math.e + 1e-12, -0.3, -1e-4, 1e-6, 0.5, 10.0, 1e4, 1e12]
    )
    def test_defining_residual(self, x):
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) < 1e-12 * max(1.0, abs(x))

    def test_below_branch_point_rejected(self):
        with pytest.raises(ValueError):
            lambert_w0(-0.5)


class TestCostFinite:
    def test_full_prefetch_leaves_only_delay(self):
        params = QueueParams(lam=2.0, mu=1.0)
        w = QoeWeights(gamma=1e-3)
        got = cost_finite(params, 50, 50, w)
        assert got == pytest.approx(1e-3 * (50.0 / 2.0) ** 2, rel=1e-12)

    def test_zero_delay_weight_reduces_to_starvation_probability(self):
        from playout.ballot import starvation_probability
        from playout.core import ScenarioSpec

        params = QueueParams.from_rho(0.9)
        got = cost_finite(params, 80, 12, QoeWeights(gamma=0.0))
        assert got == starvation_probability(params, ScenarioSpec(80, 12))

    def test_tolerating_one_starvation_lowers_the_cost(self):
        params = QueueParams.from_rho(0.9)
        w = QoeWeights(gamma=1e-4)
        strict = cost_finite(params, 120, 10, w, tolerated=0)
        lax = cost_finite(params, 120, 10, w, tolerated=1)
        assert lax < strict


class TestOptimizeFinite:
    def test_small_file_scan_equals_independent_scan(self):
        params = QueueParams(lam=0.9, mu=1.0)
        w = QoeWeights(gamma=1e-3)
        res = optimize_finite(params, 25, w)
        costs = [(cost_finite(params, 25, x1, w), x1) for x1 in range(1, 26)]
        best_cost, best_x1 = min(costs)
        assert res.x1_star_int == best_x1
        assert res.cost_at_optimum == best_cost
        assert res.method == "grid-search"

    def test_zero_weight_downloads_everything(self):
        params = QueueParams(lam=20.0, mu=25.0)
        res = optimize_finite(params, 60, QoeWeights(gamma=0.0))
        assert res.x1_star_int == 60

    def test_ties_break_toward_smaller_threshold(self):
        # with no delay weight and an overwhelming arrival rate the
        # starvation term underflows to an exact zero over a whole range of
        # thresholds; the scan must keep the smallest of the tied winners
        params = QueueParams.from_rho(100.0)
        res = optimize_finite(params, 400, QoeWeights(gamma=0.0))
        assert res.cost_at_optimum == 0.0
        assert res.x1_star_int < 400
        assert cost_finite(params, 400, res.x1_star_int - 1, QoeWeights(gamma=0.0)) > 0.0

    def test_degenerate_regime_pins_threshold_to_one(self):
        w = QoeWeights(gamma=5e-3)
        for lam in (16.0, 19.0):
            res = optimize_finite(QueueParams(lam=lam, mu=25.0), 1000, w)
            assert res.x1_star_int == 1

    def test_bounds_clamp_the_scan(self):
        params = QueueParams(lam=20.0, mu=25.0)
        res = optimize_finite(params, 200, QoeWeights(gamma=0.0), bounds=(10, 50))
        assert res.x1_star_int == 50

    def test_starvation_sensitive_users_prefetch_more(self):
        # at every arrival rate the lighter delay weight wins a higher
        # optimal threshold
        for lam in (16.0, 20.0, 24.0):
            params = QueueParams(lam=lam, mu=25.0)
            light = optimize_finite(params, 1000, QoeWeights(gamma=1e-4))
            heavy = optimize_finite(params, 1000, QoeWeights(gamma=1e-3))
            assert light.x1_star_int > heavy.x1_star_int


class TestOptimizeInfiniteSupercritical:
    @pytest.mark.parametrize("lam", [1.1, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("gamma", [1e-4, 1e-3])
    def test_stationarity_as_printed(self, lam, gamma):
        params = QueueParams(lam=lam, mu=1.0)
        res = optimize_infinite_supercritical(params, QoeWeights(gamma=gamma))
        p, q = params.p, params.q
        a = (2.0 * p - 1.0) / (2.0 * p * q)
        lhs = res.x1_star * math.exp(a * res.x1_star)
        rhs = (2.0 * p - 1.0) * lam**2 / (4.0 * gamma * p * q)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))

    @pytest.mark.parametrize("lam", [1.2, 2.5])
    def test_matches_golden_section(self, lam):
        params = QueueParams(lam=lam, mu=1.0)
        gamma = 1e-3
        res = optimize_infinite_supercritical(params, QoeWeights(gamma=gamma))
        p, q = params.p, params.q
        a = (2.0 * p - 1.0) / (2.0 * p * q)
        found = golden_section(
            lambda x: math.exp(-a * x) + gamma * (x / lam) ** 2,
            1e-9,
            10.0 * res.x1_star + 100.0,
            tol=1e-7,
        )
        assert abs(found - res.x1_star) < 1e-3

    def test_heavier_delay_weight_shrinks_threshold(self):
        params = QueueParams(lam=1.5, mu=1.0)
        light = optimize_infinite_supercritical(params, QoeWeights(gamma=1e-4))
        heavy = optimize_infinite_supercritical(params, QoeWeights(gamma=1e-2))
        assert heavy.x1_star < light.x1_star

    def test_subcritical_load_rejected(self):
        with pytest.raises(ValueError):
            optimize_infinite_supercritical(QueueParams.from_rho(0.9), QoeWeights(gamma=1e-3))


class TestOptimizeInfiniteSubcritical:
    @pytest.mark.parametrize("lam", [0.5, 0.8, 0.95, 0.99])
    @pytest.mark.parametrize("gamma", [1e-4, 1e-3])
    def test_stationarity_and_golden_agreement(self, lam, gamma):
        params = QueueParams(lam=lam, mu=1.0)
        res = optimize_infinite_subcritical(params, QoeWeights(gamma=gamma))
        delta = 1.0
        c = delta / (lam * (1.0 - params.rho))
        lhs = (c * res.x1_star) * math.exp(c * res.x1_star)
        rhs = delta**2 / (2.0 * gamma * (1.0 - params.rho) ** 2)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))
        found = golden_section(
            lambda x: math.exp(-c * x) + gamma * (x / lam) ** 2,
            1e-9,
            10.0 * res.x1_star + 100.0,
            tol=1e-7,
        )
        assert abs(found - res.x1_star) < 1e-3

    def test_heavier_delay_weight_shrinks_threshold(self):
        params = QueueParams(lam=0.9, mu=1.0)
        light = optimize_infinite_subcritical(params, QoeWeights(gamma=1e-4))
        heavy = optimize_infinite_subcritical(params, QoeWeights(gamma=1e-2))
        assert heavy.x1_star < light.x1_star

    def test_supercritical_load_rejected(self):
        with pytest.raises(ValueError):
            optimize_infinite_subcritical(QueueParams.from_rho(1.2), QoeWeights(gamma=1e-3))


class TestOptimizeFileLevel:
    @pytest.mark.parametrize("theta", [1e-3, 5e-4])
    @pytest.mark.parametrize("gamma", [0.01, 0.005])
    def test_stationarity_and_golden_agreement(self, theta, gamma):
        mu = 25.0
        lam = 22.0
        res = optimize_file_level(lam, mu, theta, QoeWeights(gamma=gamma))
        c = theta * mu / (mu - lam)
        lhs = (c * res.x1_star) * math.exp(c * res.x1_star)
        rhs = (theta * mu * lam / (mu - lam)) ** 2 / (2.0 * gamma)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))
        found = golden_section(
            lambda x: math.exp(-c * x) + gamma * (x / lam) ** 2,
            1e-9,
            10.0 * res.x1_star + 100.0,
            tol=1e-7,
        )
        assert abs(found - res.x1_star) < 1e-3

    def test_lighter_delay_weight_grows_threshold(self):
        a = optimize_file_level(22.0, 25.0, 1e-3, QoeWeights(gamma=0.01))
        b = optimize_file_level(22.0, 25.0, 1e-3, QoeWeights(gamma=0.005))
        assert b.x1_star > a.x1_star

    def test_starvation_probability_falls_as_arrivals_speed_up(self):
        mu, theta, gamma = 25.0, 5e-4, 0.01
        previous = None
        lam = 20.0
        while lam < 24.9:
            res = optimize_file_level(lam, mu, theta, QoeWeights(gamma=gamma))
            prob = math.exp(-theta * mu * res.x1_star / (mu - lam))
            if previous is not None:
                assert prob < previous
            previous = prob
            lam += 0.25

    def test_rate_balance_degenerates_to_minimal_threshold(self):
        res = optimize_file_level(25.0, 25.0, 1e-3, QoeWeights(gamma=0.01))
        assert res.x1_star == 0.0
        assert res.x1_star_int == 1

    def test_unstable_rates_rejected(self):
        with pytest.raises(ValueError):
            optimize_file_level(26.0, 25.0, 1e-3, QoeWeights(gamma=0.01))

    def test_integer_candidate_is_floor_or_ceil(self):
        res = optimize_file_level(22.0, 25.0, 1e-3, QoeWeights(gamma=0.005))
        assert res.x1_star_int in (math.floor(res.x1_star), math.ceil(res.x1_star))
