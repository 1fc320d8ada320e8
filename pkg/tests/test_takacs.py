import math

import numpy as np
import pytest

from playout.ballot import BandedToeplitzMatrix, starvation_pmf
from playout.core import QueueParams, ScenarioSpec
from playout.takacs import (
    SlottedScenario,
    takacs_first_starvation,
    takacs_pmf,
    takacs_starvation_probability,
)


def scenario(lam_d=0.9, x1=10, n=100, d=1.0):
    return SlottedScenario(lam=lam_d / d, d=d, file_size=n, threshold=x1)


class TestFirstStarvation:
    def test_earliest_possible_slot(self):
        # first empty right after the prefetched packets: no arrivals at all
        scn = scenario(lam_d=0.7, x1=12, n=50)
        got = takacs_first_starvation(scn, 12)
        assert got == pytest.approx(math.exp(-0.7 * 12), rel=1e-12)

    def test_out_of_range_is_zero(self):
        scn = scenario(x1=10, n=50)
        assert takacs_first_starvation(scn, 9) == 0.0
        assert takacs_first_starvation(scn, 50) == 0.0
        assert takacs_first_starvation(scn, 51) == 0.0

    def test_terms_sum_to_total(self):
        scn = scenario(lam_d=1.1, x1=20, n=300)
        total = math.fsum(takacs_first_starvation(scn, l) for l in range(20, 300))
        assert total == takacs_starvation_probability(scn)

    def test_slot_length_only_enters_through_the_product(self):
        # same lam*d, different slot lengths: identical distribution
        a = scenario(lam_d=0.8, x1=5, n=40, d=1.0)
        b = scenario(lam_d=0.8, x1=5, n=40, d=0.25)
        for l in range(5, 40):
            assert takacs_first_starvation(a, l) == pytest.approx(
                takacs_first_starvation(b, l), rel=1e-12
            )


class TestStarvationProbability:
    def test_whole_file_prefetched(self):
        assert takacs_starvation_probability(scenario(x1=30, n=30)) == 0.0

    def test_vanishing_arrivals_guarantee_starvation(self):
        scn = SlottedScenario(lam=1e-9, d=1.0, file_size=40, threshold=10)
        assert takacs_starvation_probability(scn) == pytest.approx(1.0, abs=1e-6)

    def test_monotone_in_threshold(self):
        values = [takacs_starvation_probability(scenario(lam_d=1.05, x1=x1, n=200))
                  for x1 in range(1, 60)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestPmf:
    def test_degenerate_whole_file(self):
        dist = takacs_pmf(scenario(x1=25, n=25))
        assert dist.pmf[0] == 1.0
        assert all(v == 0.0 for v in dist.pmf[1:])

    @pytest.mark.parametrize("lam_d", [0.8, 1.1])
    @pytest.mark.parametrize("n,x1", [(20, 3), (45, 5), (60, 9)])
    def test_normalizes_on_small_files(self, lam_d, n, x1):
        dist = takacs_pmf(scenario(lam_d=lam_d, x1=x1, n=n))
        assert dist.total_mass() == pytest.approx(1.0, abs=1e-6)

    def test_zero_mass_complements_total(self):
        scn = scenario(lam_d=1.1, x1=15, n=280)
        dist = takacs_pmf(scn, j_max=0)
        assert dist.pmf[0] == pytest.approx(
            1.0 - takacs_starvation_probability(scn), abs=1e-12
        )

    def test_rejects_oversized_jmax(self):
        with pytest.raises(ValueError):
            takacs_pmf(scenario(x1=10, n=40), j_max=5)

    def test_gap_matrix_is_shift_invariant(self):
        # the slotted empty-to-empty weight depends only on the packet-index
        # gap, so the same banded Toeplitz carrier applies
        scn = scenario(lam_d=0.95, x1=4, n=40)
        gen = np.zeros(41)
        for gap in range(4, 40):
            gen[gap] = takacs_first_starvation(
                SlottedScenario(lam=scn.lam, d=scn.d, file_size=41, threshold=4), gap
            )
        mat = BandedToeplitzMatrix(file_size=40, level=1, threshold=4, gen=gen,
                                   min_offset=4, row_min=4, col_max=35)
        for row in range(4, 25):
            for col in range(row + 4, 33):
                a, b = mat.entry(row, col), mat.entry(row + 1, col + 1)
                if a != 0.0 and b != 0.0:
                    assert a == b

    def test_first_starvation_position_matches_direct_simulation(self):
        # independent micro oracle: replay the slotted race in bulk and
        # record the packet at which the buffer first empties
        lam_d, x1, n, reps = 0.9, 10, 60, 100_000
        rng = np.random.default_rng(123)
        arrivals = np.cumsum(rng.exponential(1.0 / lam_d, (reps, n)), axis=1)
        t0 = arrivals[:, x1 - 1]
        deps = t0[:, None] + np.arange(1.0, n + 1.0)
        # row-offset trick so one flat searchsorted handles every replication
        span = float(deps.max()) + 1.0
        offsets = (np.arange(reps) * span)[:, None]
        flat = np.searchsorted(
            (arrivals + offsets).ravel(), (deps + offsets).ravel(), side="right"
        )
        arrived = flat.reshape(reps, n) - np.arange(reps)[:, None] * n
        level = arrived - np.arange(1, n + 1)
        first_empty = np.argmax(level == 0, axis=1) + 1  # the final packet always hits 0
        scn = scenario(lam_d=lam_d, x1=x1, n=n)
        want = takacs_first_starvation(scn, 30)
        got = float(np.mean(first_empty == 30))
        assert abs(got - want) < 3 * math.sqrt(want * (1 - want) / reps)
        total = takacs_starvation_probability(scn)
        got_total = float(np.mean(first_empty < n))
        assert abs(got_total - total) < 3 * math.sqrt(total * (1 - total) / reps)

    def test_roughly_tracks_continuous_model_at_equal_load(self):
        # heuristic sanity only: a slotted decoder at load lam*d tracks the
        # continuous one at the same intensity within ten percentage points
        # for long stable files; above critical load the deterministic
        # service (half the race variance) keeps strictly more mass on zero
        # starvations, so only the ordering is checked there
        for n in (500, 1000):
            slotted = takacs_pmf(scenario(lam_d=0.9, x1=20, n=n), j_max=0).pmf[0]
            smooth = starvation_pmf(
                QueueParams.from_rho(0.9), ScenarioSpec(n, 20), j_max=0
            ).pmf[0]
            assert slotted == pytest.approx(smooth, abs=0.1)
        for load in (1.0, 1.1):
            slotted = takacs_pmf(scenario(lam_d=load, x1=20, n=600), j_max=0).pmf[0]
            smooth = starvation_pmf(
                QueueParams.from_rho(load), ScenarioSpec(600, 20), j_max=0
            ).pmf[0]
            assert slotted > smooth
