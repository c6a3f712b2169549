"""Closed-form protocol results, checked against independent enumeration."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from shortlist.theory import (
    MultiPartyReport,
    ProtocolReport,
    ShortlistSchedule,
    TwoPartyParams,
    chooser_rank_pmf,
    common_expected_rank,
    expected_chooser_rank,
    expected_order_statistic,
    expected_proposer_rank,
    expected_random_top_pick,
    expected_total_rank,
    floor_formula_shortlist_size,
    ideal_schedule,
    ideal_shortlist_size,
    optimal_integer_schedule,
    optimal_shortlist_size,
    rank_gap_report,
    schedule_report,
    worst_case_probabilities,
)

F = Fraction


def subset_pmf(n: int, k: int) -> dict[int, Fraction]:
    """Law of the minimum over uniform k-subsets of 1..n, by listing
    all subsets. Independent route for the chooser-rank distribution:
    the chooser's rank is the minimum of her ranks of the offered set,
    which is a uniform random k-subset of 1..n."""
    counts: dict[int, int] = {}
    total = 0
    for subset in combinations(range(1, n + 1), k):
        counts[min(subset)] = counts.get(min(subset), 0) + 1
        total += 1
    return {d: F(c, total) for d, c in counts.items()}


class TestRankPmf:
    def test_frozen_small_cases(self):
        pmf32 = chooser_rank_pmf(TwoPartyParams(3, 2)).pmf
        assert pmf32 == {1: F(2, 3), 2: F(1, 3)}
        pmf63 = chooser_rank_pmf(TwoPartyParams(6, 3)).pmf
        assert pmf63[2] == F(3, 10)
        assert chooser_rank_pmf(TwoPartyParams(9, 9)).pmf == {1: F(1)}

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_matches_subset_enumeration(self, n):
        for k in range(1, n + 1):
            assert chooser_rank_pmf(TwoPartyParams(n, k)).pmf == subset_pmf(n, k)

    def test_sums_to_one_and_mean_exact_up_to_40(self):
        for n in range(1, 41):
            for k in range(1, n + 1):
                dist = chooser_rank_pmf(TwoPartyParams(n, k))
                assert sum(dist.pmf.values()) == 1
                assert dist.mean() == F(n + 1, k + 1)
                assert set(dist.pmf) == set(range(1, n - k + 2))

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            TwoPartyParams(3, 0)
        with pytest.raises(ValueError):
            TwoPartyParams(3, 4)
        with pytest.raises(ValueError):
            TwoPartyParams(0, 1)


class TestExpectations:
    def test_frozen_values(self):
        assert expected_chooser_rank(TwoPartyParams(3, 2)) == F(4, 3)
        assert expected_proposer_rank(TwoPartyParams(3, 2)) == F(3, 2)
        assert expected_chooser_rank(TwoPartyParams(6, 3)) == F(7, 4)
        assert expected_proposer_rank(TwoPartyParams(6, 3)) == 2
        assert expected_chooser_rank(TwoPartyParams(9, 9)) == 1
        assert expected_proposer_rank(TwoPartyParams(9, 1)) == 1
        assert expected_total_rank(TwoPartyParams(10, 4)) == F(47, 10)
        assert expected_total_rank(TwoPartyParams(7, 3)) == 4
        assert expected_total_rank(TwoPartyParams(1, 1)) == 2

    @given(st.data())
    def test_product_identity_for_every_size(self, data):
        n = data.draw(st.integers(1, 500))
        k = data.draw(st.integers(1, n))
        params = TwoPartyParams(n, k)
        product = expected_chooser_rank(params) * expected_proposer_rank(params)
        assert product == F(n + 1, 2)


class TestIdealSize:
    def test_exact_points(self):
        assert ideal_shortlist_size(7) == 3.0
        assert ideal_shortlist_size(1) == 1.0
        assert ideal_shortlist_size(17) == 5.0

    def test_irrational_point(self):
        assert ideal_shortlist_size(4) == pytest.approx(2.16228, abs=5e-6)

    def test_total_at_ideal_size(self):
        # At the ideal size the total collapses to sqrt(2N+2).
        for n in (1, 6, 12, 100):
            k = ideal_shortlist_size(n)
            total = (n + 1) / (k + 1) + (k + 1) / 2
            assert total == pytest.approx(math.sqrt(2 * n + 2), rel=1e-12)


class TestOptimalSize:
    def test_published_table_ranges(self):
        # Range boundaries (2, 5, 9, 14, ...) are exactly the tie
        # points: there the published value is the larger of the two
        # optima, so membership is the correct check; everywhere else
        # the canonical size must match exactly.
        expected = {1: 1, 7: 3, 43: 8}
        for lo, hi, k in [
            (2, 4, 2),
            (5, 8, 3),
            (9, 13, 4),
            (14, 19, 5),
            (20, 26, 6),
            (27, 34, 7),
            (35, 43, 8),
        ]:
            for n in range(lo, hi + 1):
                expected[n] = k
        for n, k in expected.items():
            optimum = optimal_shortlist_size(n)
            assert k in optimum.candidates, n
            if not optimum.tie:
                assert optimum.canonical == k, n

    def test_first_ten_sizes_with_ties(self):
        listed = [
            (1,),
            (1, 2),
            (2,),
            (2,),
            (2, 3),
            (3,),
            (3,),
            (3,),
            (3, 4),
            (4,),
        ]
        for n, candidates in enumerate(listed, start=1):
            assert optimal_shortlist_size(n).candidates == candidates, n

    def test_tie_structure(self):
        tie = optimal_shortlist_size(2)
        assert tie.tie and tie.candidates == (1, 2)
        assert tie.expected_total == F(5, 2)
        # both members achieve the tied optimum m + 1/2
        assert expected_total_rank(TwoPartyParams(2, 1)) == F(5, 2)
        assert expected_total_rank(TwoPartyParams(2, 2)) == F(5, 2)
        tie5 = optimal_shortlist_size(5)
        assert tie5.tie and tie5.candidates == (2, 3)
        assert expected_total_rank(TwoPartyParams(5, 2)) == F(7, 2)
        assert expected_total_rank(TwoPartyParams(5, 3)) == F(7, 2)
        assert not optimal_shortlist_size(7).tie

    def test_tie_exactly_at_triangular_minus_one(self):
        triangulars = set()
        m = value = 1
        while value <= 10_001:
            triangulars.add(value)
            m += 1
            value = m * (m + 1) // 2
        for n in range(1, 2001):
            assert optimal_shortlist_size(n).tie == ((n + 1) in triangulars), n

    def test_floor_formula_agreement_small(self):
        # The closed form always lands inside the optimal set.  At tie
        # menus (n + 1 triangular) it resolves to the larger candidate,
        # everywhere else it coincides with the canonical choice.
        for n in range(1, 20_001):
            optimum = optimal_shortlist_size(n)
            closed = floor_formula_shortlist_size(n)
            assert closed in optimum.candidates
            if optimum.tie:
                assert closed == optimum.candidates[-1]
            else:
                assert closed == optimum.canonical

    def test_optimal_beats_every_other_size(self):
        for n in range(1, 120):
            best = optimal_shortlist_size(n)
            totals = {
                k: expected_total_rank(TwoPartyParams(n, k)) for k in range(1, n + 1)
            }
            true_min = min(totals.values())
            assert best.expected_total == true_min
            winners = tuple(sorted(k for k, t in totals.items() if t == true_min))
            assert winners == best.candidates

    def test_monotone_dominance(self):
        # The canonical size never loses to the next size down.
        for n in range(3, 2000):
            m = optimal_shortlist_size(n).canonical + 1
            if m - 2 < 1:
                continue
            e_small = expected_total_rank(TwoPartyParams(n, m - 2))
            e_best = expected_total_rank(TwoPartyParams(n, m - 1))
            assert e_best <= e_small
            if e_best == e_small:
                assert optimal_shortlist_size(n).tie


class TestSecondMoments:
    def pmf_second_moment(self, n: int, k: int) -> Fraction:
        dist = chooser_rank_pmf(TwoPartyParams(n, k))
        return dist.second_moment()

    def test_frozen_values(self):
        report = rank_gap_report(TwoPartyParams(3, 2))
        chooser_sq = self.pmf_second_moment(3, 2)
        assert chooser_sq == 2
        proposer_sq = F((2 + 1) * (2 * 2 + 1), 6)
        assert proposer_sq == F(5, 2)
        assert report.gap_second_moment == chooser_sq + proposer_sq - 2 * F(4, 3) * F(3, 2)

    def test_formula_matches_pmf_route(self):
        for n in range(1, 31):
            for k in range(1, n + 1):
                report = rank_gap_report(TwoPartyParams(n, k))
                chooser_sq = self.pmf_second_moment(n, k)
                proposer_sq = F(sum(d * d for d in range(1, k + 1)), k)
                gap = F(n + 1, k + 1) - F(k + 1, 2)
                expected_sq = (
                    chooser_sq + proposer_sq - 2 * F(n + 1, k + 1) * F(k + 1, 2)
                )
                assert report.gap_second_moment == expected_sq, (n, k)
                assert report.fairness_gap == gap
                assert report.gap_variance == expected_sq - gap * gap

    def test_report_internal_identities(self):
        for n, k in [(6, 3), (12, 4), (26, 6), (1, 1), (40, 40)]:
            report = rank_gap_report(TwoPartyParams(n, k))
            assert report.expected_total == (
                report.expected_chooser_rank + report.expected_proposer_rank
            )
            assert report.gap_variance == (
                report.gap_second_moment - report.fairness_gap**2
            )
            assert report.sigma_bound == pytest.approx(
                math.sqrt(2 * (n + 1) / 3), rel=1e-12
            )

    def test_bound_at_perfect_square_points(self):
        # where the ideal size is an integer the second moment sits
        # strictly under 2(N+1)/3
        for n in (7, 17, 31):
            k = int(ideal_shortlist_size(n))
            assert math.sqrt(2 * n + 2) == k + 1
            report = rank_gap_report(TwoPartyParams(n, k))
            assert report.gap_second_moment < F(2 * (n + 1), 3)

    def test_menu_of_twelve_bound(self):
        report = rank_gap_report(TwoPartyParams(12, 4))
        assert report.sigma_bound < 3.0


class TestWorstCase:
    def test_values(self):
        assert worst_case_probabilities(TwoPartyParams(6, 3)) == (F(1, 20), F(1, 60))
        assert worst_case_probabilities(TwoPartyParams(2, 1)) == (F(1, 2), F(1, 2))
        n = 9
        assert worst_case_probabilities(TwoPartyParams(n, n)) == (F(1), F(1, n))

    def test_by_enumeration(self):
        # every (offered subset, chooser pick) outcome, uniformly
        for n, k in [(5, 2), (6, 3), (4, 4)]:
            chooser_worst = 0
            both_worst = 0
            outcomes = 0
            for subset in combinations(range(1, n + 1), k):
                for pick_pos in range(1, k + 1):
                    outcomes += 1
                    if min(subset) == n - k + 1:
                        if pick_pos == k:
                            both_worst += 1
            for subset in combinations(range(1, n + 1), k):
                if min(subset) == n - k + 1:
                    chooser_worst += 1
            expected = worst_case_probabilities(TwoPartyParams(n, k))
            assert expected[0] == F(chooser_worst, len(list(combinations(range(n), k))))
            assert expected[1] == F(both_worst, outcomes)


class TestOrderStatistics:
    def test_frozen_values(self):
        assert expected_order_statistic(4, 2, 1) == F(5, 3)
        assert expected_order_statistic(4, 2, 2) == F(10, 3)
        assert expected_order_statistic(9, 9, 4) == 4

    def test_by_enumeration(self):
        for n in range(1, 9):
            for a in range(1, n + 1):
                for i in range(1, a + 1):
                    total = 0
                    count = 0
                    for subset in combinations(range(1, n + 1), a):
                        total += sorted(subset)[i - 1]
                        count += 1
                    assert expected_order_statistic(n, a, i) == F(total, count), (n, a, i)

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            expected_order_statistic(4, 5, 1)
        with pytest.raises(ValueError):
            expected_order_statistic(4, 2, 3)
        with pytest.raises(ValueError):
            expected_order_statistic(4, 2, 0)


class TestTopBlockPick:
    def test_frozen_values(self):
        assert expected_random_top_pick(4, 2, 2) == F(5, 2)
        assert expected_random_top_pick(12, 5, 2) == F(13, 4)
        assert expected_random_top_pick(30, 30, 1) == 1

    def test_is_average_of_order_statistics(self):
        for n in range(1, 13):
            for a in range(1, n + 1):
                for b in range(1, a + 1):
                    avg = sum(
                        (expected_order_statistic(n, a, i) for i in range(1, b + 1)),
                        F(0),
                    ) / b
                    assert expected_random_top_pick(n, a, b) == avg

    def test_rejects_bad_block(self):
        with pytest.raises(ValueError):
            expected_random_top_pick(4, 2, 3)
        with pytest.raises(ValueError):
            expected_random_top_pick(4, 0, 1)


class TestIdealSchedule:
    def test_endpoints_exact(self):
        for n, s in [(12, 3), (1, 4), (100, 2), (7, 1)]:
            sizes = ideal_schedule(n, s)
            assert len(sizes) == s + 1
            assert sizes[0] == pytest.approx(n, rel=1e-12)
            assert sizes[-1] == pytest.approx(1, rel=1e-12)

    def test_worked_interior_values(self):
        sizes = ideal_schedule(12, 3)
        assert sizes[1] == pytest.approx(5.9657, abs=5e-4)
        assert sizes[2] == pytest.approx(2.7326, abs=5e-4)

    def test_two_person_case_matches_ideal_size(self):
        for n in (1, 7, 12, 200):
            assert ideal_schedule(n, 2)[1] == pytest.approx(
                ideal_shortlist_size(n), rel=1e-12
            )

    def test_single_item_menu(self):
        assert ideal_schedule(1, 5) == pytest.approx([1.0] * 6)

    def test_every_person_equally_placed(self):
        # the real schedule equalizes everyone's expected rank
        for n, s in [(12, 3), (30, 4), (5, 2)]:
            sizes = ideal_schedule(n, s)
            common = common_expected_rank(n, s)
            for prev, cur in zip(sizes, sizes[1:]):
                rank = (n + 1) * (cur + 1) / (2 * (prev + 1))
                assert rank == pytest.approx(common, rel=1e-9)


class TestCommonRank:
    def test_values(self):
        assert common_expected_rank(10, 1) == 1.0
        assert common_expected_rank(7, 2) == 2.0
        assert common_expected_rank(12, 3) == pytest.approx(6.5 ** (2 / 3), rel=1e-12)

    def test_large_menu_percentile_vanishes(self):
        n = 10**6
        assert common_expected_rank(n, 2) / n < 1e-3


class TestScheduleReport:
    def test_per_person_formula(self):
        report = schedule_report(ShortlistSchedule((12, 6, 3, 1)))
        assert report.per_person == (F(7, 2), F(26, 7), F(13, 4))
        assert report.expected_total == F(293, 28)

    def test_pass_through_participant(self):
        report = schedule_report(ShortlistSchedule((3, 3, 1)))
        assert report.per_person == (F(2), F(1))

    def test_total_is_sum(self):
        for sizes in [(12, 6, 3, 1), (7, 3, 1), (5, 5, 5, 1), (1, 1, 1)]:
            report = schedule_report(ShortlistSchedule(sizes))
            assert report.expected_total == sum(report.per_person, F(0))

    @given(st.data())
    def test_am_gm_floor(self, data):
        n = data.draw(st.integers(1, 60))
        s = data.draw(st.integers(1, 6))
        sizes = [n]
        for _ in range(s - 1):
            sizes.append(data.draw(st.integers(1, sizes[-1])))
        sizes.append(1)
        if sizes[-2] < 1 or any(a < b for a, b in zip(sizes, sizes[1:])):
            return
        report = schedule_report(ShortlistSchedule(tuple(sizes)))
        floor = common_expected_rank(n, s)
        assert float(report.expected_total) / s >= floor - 1e-9


class TestScheduleValidation:
    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            ShortlistSchedule((5,))
        with pytest.raises(ValueError):
            ShortlistSchedule((5, 3, 2))  # does not end at 1
        with pytest.raises(ValueError):
            ShortlistSchedule((5, 6, 1))  # increases
        with pytest.raises(ValueError):
            ShortlistSchedule((5, 0, 1))

    def test_properties(self):
        schedule = ShortlistSchedule((12, 6, 3, 1))
        assert schedule.menu_size == 12
        assert schedule.people == 3


def brute_force_schedule(n: int, s: int) -> tuple[tuple[int, ...], Fraction]:
    """Independent optimizer: literally try every non-increasing chain."""
    best_sizes: tuple[int, ...] | None = None
    best_total: Fraction | None = None

    def extend(chain: list[int]) -> None:
        nonlocal best_sizes, best_total
        if len(chain) == s + 1:
            if chain[-1] != 1:
                return
            total = sum(
                (F((n + 1) * (cur + 1), 2 * (prev + 1)) for prev, cur in zip(chain, chain[1:])),
                F(0),
            )
            key = tuple(chain)
            if best_total is None or total < best_total or (
                total == best_total and key < best_sizes
            ):
                best_total = total
                best_sizes = key
            return
        for nxt in range(1, chain[-1] + 1):
            extend(chain + [nxt])

    extend([n])
    assert best_sizes is not None and best_total is not None
    return best_sizes, best_total


class TestIntegerSchedule:
    def test_worked_example(self):
        best, report = optimal_integer_schedule(12, 3)
        assert best.sizes == (12, 6, 3, 1)
        assert report.expected_total == F(293, 28)
        assert report.per_person == (F(7, 2), F(26, 7), F(13, 4))

    def test_two_person_consistency_up_to_200(self):
        for n in range(1, 201):
            best, report = optimal_integer_schedule(n, 2)
            optimum = optimal_shortlist_size(n)
            assert report.expected_total == optimum.expected_total, n
            assert best.sizes[1] == optimum.canonical, n

    def test_degenerate_menus(self):
        best, report = optimal_integer_schedule(1, 2)
        assert best.sizes == (1, 1, 1)
        assert all(v == 1 for v in report.per_person)
        best, _ = optimal_integer_schedule(1, 4)
        assert best.sizes == (1, 1, 1, 1, 1)
        best, report = optimal_integer_schedule(5, 1)
        assert best.sizes == (5, 1)
        # a lone participant keeps her favorite, rank 1 always
        assert report.per_person == (F(1),)

    def test_matches_brute_force_small(self):
        for n in range(1, 11):
            for s in range(1, 5):
                expected_sizes, expected_total = brute_force_schedule(n, s)
                best, report = optimal_integer_schedule(n, s)
                assert best.sizes == expected_sizes, (n, s)
                assert report.expected_total == expected_total, (n, s)

    def test_lexicographic_tie_break(self):
        # menu of 2, two people: [2,1,1] and [2,2,1] both cost 5/2
        best, report = optimal_integer_schedule(2, 2)
        assert best.sizes == (2, 1, 1)
        assert report.expected_total == F(5, 2)

    def test_more_people_than_items(self):
        best, report = optimal_integer_schedule(2, 5)
        assert best.sizes[0] == 2 and best.sizes[-1] == 1
        assert len(best.sizes) == 6
        assert all(a >= b for a, b in zip(best.sizes, best.sizes[1:]))
