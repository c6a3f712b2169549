"""Tests for the Monte Carlo runner.

Statistical checks compare against the exact closed forms with wide
(4 standard error) tolerances; determinism checks demand bit identity.
"""

import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import shortlist.simulate  # noqa: F401  (registers the submodule)
from shortlist.simulate import SimulationConfig, SimulationSummary, simulate
from shortlist.simulate import random_permutation, two_party_config
from shortlist.theory import (
    ShortlistSchedule,
    TwoPartyParams,
    rank_gap_report,
    schedule_report,
)

# the package re-exports the simulate() function under the submodule's
# name, so fetch the module itself for attribute patching
SIM_MODULE = sys.modules["shortlist.simulate"]

SEED = 20260818


def z_score(observed: float, exact, se: float) -> float:
    if se == 0.0:
        return 0.0 if observed == float(exact) else float("inf")
    return abs(observed - float(exact)) / se


def small_schedules(draw):
    n = draw(st.integers(1, 6))
    people = draw(st.integers(1, 4))
    interior = sorted(
        (draw(st.integers(1, n)) for _ in range(people - 1)), reverse=True
    )
    return n, ShortlistSchedule(tuple([n] + interior + [1]))


class TestConfigValidation:
    def test_menu_schedule_mismatch(self):
        with pytest.raises(ValueError):
            SimulationConfig(
                menu_size=5,
                schedule=ShortlistSchedule((4, 2, 1)),
                trials=10,
                seed=1,
            )

    def test_trials_positive(self):
        with pytest.raises(ValueError):
            SimulationConfig(4, ShortlistSchedule((4, 2, 1)), 0, 1)

    def test_seed_range(self):
        with pytest.raises(ValueError):
            SimulationConfig(4, ShortlistSchedule((4, 2, 1)), 10, -1)
        with pytest.raises(ValueError):
            SimulationConfig(4, ShortlistSchedule((4, 2, 1)), 10, 2**64)
        SimulationConfig(4, ShortlistSchedule((4, 2, 1)), 10, 2**64 - 1)

    def test_two_party_config(self):
        config = two_party_config(6, 3, trials=100, seed=5)
        assert config.schedule.sizes == (6, 3, 1)
        for bad in (0, 7):
            with pytest.raises(ValueError):
                two_party_config(6, bad, trials=100, seed=5)


class TestRandomPermutation:
    def test_is_permutation(self):
        rng = np.random.default_rng(SEED)
        for n in (1, 2, 7, 40):
            assert sorted(random_permutation(n, rng)) == list(range(1, n + 1))

    def test_seeded_reproducibility(self):
        first = random_permutation(12, np.random.default_rng(99))
        second = random_permutation(12, np.random.default_rng(99))
        assert first == second

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            random_permutation(0, np.random.default_rng(0))


class TestDeterminism:
    def test_identical_configs_identical_summaries(self):
        config = two_party_config(12, 4, trials=20_000, seed=SEED)
        assert simulate(config) == simulate(config)

    def test_different_seeds_differ(self):
        a = simulate(two_party_config(12, 4, trials=5_000, seed=1))
        b = simulate(two_party_config(12, 4, trials=5_000, seed=2))
        assert a.mean_rank_per_person != b.mean_rank_per_person


class TestDegenerateCases:
    def test_single_item_menu_is_exact(self):
        config = SimulationConfig(1, ShortlistSchedule((1, 1, 1)), 50, SEED)
        summary = simulate(config)
        assert summary.mean_rank_per_person == (1.0, 1.0)
        assert summary.standard_error_per_person == (0.0, 0.0)
        assert summary.mean_abs_diff == 0.0
        assert summary.empirical_second_moment_diff == 0.0

    def test_single_participant(self):
        config = SimulationConfig(5, ShortlistSchedule((5, 1)), 200, SEED)
        summary = simulate(config)
        # she keeps her favorite, always rank 1
        assert summary.mean_rank_per_person == (1.0,)
        assert summary.mean_abs_diff is None
        assert summary.empirical_second_moment_diff is None

    def test_single_trial(self):
        summary = simulate(two_party_config(8, 3, trials=1, seed=7))
        assert summary.trials == 1
        assert summary.standard_error_per_person == (0.0, 0.0)
        for mean in summary.mean_rank_per_person:
            assert mean == int(mean)
            assert 1 <= mean <= 8


class TestStatisticalAgreement:
    def test_two_party_means_match_closed_forms(self):
        params = TwoPartyParams(6, 3)
        report = rank_gap_report(params)
        summary = simulate(two_party_config(6, 3, trials=50_000, seed=SEED))
        exact = (report.expected_proposer_rank, report.expected_chooser_rank)
        for mean, se, target in zip(
            summary.mean_rank_per_person,
            summary.standard_error_per_person,
            exact,
        ):
            assert z_score(mean, target, se) < 4.0

    def test_gap_second_moment_matches(self):
        report = rank_gap_report(TwoPartyParams(6, 3))
        summary = simulate(two_party_config(6, 3, trials=50_000, seed=SEED))
        z = z_score(
            summary.empirical_second_moment_diff,
            report.gap_second_moment,
            summary.second_moment_diff_se,
        )
        assert z < 4.0

    def test_multi_person_schedule_matches(self):
        schedule = ShortlistSchedule((12, 6, 3, 1))
        report = schedule_report(schedule)
        config = SimulationConfig(12, schedule, trials=50_000, seed=SEED)
        summary = simulate(config)
        assert summary.mean_abs_diff is None
        for mean, se, target in zip(
            summary.mean_rank_per_person,
            summary.standard_error_per_person,
            report.per_person,
        ):
            assert z_score(mean, target, se) < 4.0


class TestChunkSeams:
    def test_partial_final_chunk(self, monkeypatch):
        # force chunks of 7 trials so 1000 trials cross many seams,
        # ending on a partial chunk of 6
        monkeypatch.setattr(SIM_MODULE, "_CHUNK_CELLS", 42)
        config = two_party_config(6, 3, trials=1_000, seed=SEED)
        summary = simulate(config)
        repeat = simulate(config)
        assert summary == repeat
        assert summary.trials == 1_000
        report = rank_gap_report(TwoPartyParams(6, 3))
        for mean, se, target in zip(
            summary.mean_rank_per_person,
            summary.standard_error_per_person,
            (report.expected_proposer_rank, report.expected_chooser_rank),
        ):
            assert z_score(mean, target, se) < 5.0


class TestSummaryInvariants:
    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_bounds_and_totals(self, data):
        n, schedule = small_schedules(data.draw)
        trials = data.draw(st.integers(1, 60))
        seed = data.draw(st.integers(0, 2**64 - 1))
        summary = simulate(SimulationConfig(n, schedule, trials, seed))
        assert summary.trials == trials
        assert summary.seed == seed
        assert len(summary.mean_rank_per_person) == schedule.people
        total = 0.0
        for mean in summary.mean_rank_per_person:
            assert 1.0 <= mean <= float(n)
            total += mean
        assert summary.mean_total == total
        if schedule.people == 2:
            gap = summary.mean_abs_diff
            second = summary.empirical_second_moment_diff
            assert gap is not None and second is not None
            # Cauchy-Schwarz on the empirical distribution
            assert gap * gap <= second + 1e-9
        else:
            assert summary.mean_abs_diff is None
