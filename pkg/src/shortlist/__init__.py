"""Group decision-making by sequential shortlist narrowing.

A group shares one item from a menu: each participant in turn keeps
her favourite few of the items offered to her and passes them on, and
the last participant's single pick is what everyone gets. This package
provides the exact theory of that protocol (expected ranks, optimal
shortlist sizes and schedules, fairness bounds), brute-force oracles,
a seeded Monte Carlo simulator, a live session engine, and an HTTP
API plus CLI around it all.
"""

from __future__ import annotations

from .exactmath import (
    ExactRational,
    TriangularIndex,
    binomial,
    decimal_string,
    factorial,
    triangular,
    triangular_bracket,
)
from .oracle import (
    OracleResult,
    PairRanks,
    a129591_brute,
    a129591_closed,
    borda_expected,
    borda_min_of_permutation,
    borda_oracle,
    exhaustive_multi_party,
    exhaustive_two_party,
    fairness_first_baseline,
)
from .session import (
    Menu,
    MenuItem,
    SessionReport,
    SessionState,
    SessionStore,
    menu_from_labels,
)
from .simulate import (
    SimulationConfig,
    SimulationSummary,
    random_permutation,
    simulate,
    two_party_config,
)
from .theory import (
    MultiPartyReport,
    ProtocolReport,
    RankDistribution,
    ShortlistOptimum,
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

__all__ = [
    "ExactRational",
    "TriangularIndex",
    "binomial",
    "decimal_string",
    "factorial",
    "triangular",
    "triangular_bracket",
    "OracleResult",
    "PairRanks",
    "a129591_brute",
    "a129591_closed",
    "borda_expected",
    "borda_min_of_permutation",
    "borda_oracle",
    "exhaustive_multi_party",
    "exhaustive_two_party",
    "fairness_first_baseline",
    "Menu",
    "MenuItem",
    "SessionReport",
    "SessionState",
    "SessionStore",
    "menu_from_labels",
    "SimulationConfig",
    "SimulationSummary",
    "random_permutation",
    "simulate",
    "two_party_config",
    "MultiPartyReport",
    "ProtocolReport",
    "RankDistribution",
    "ShortlistOptimum",
    "ShortlistSchedule",
    "TwoPartyParams",
    "chooser_rank_pmf",
    "common_expected_rank",
    "expected_chooser_rank",
    "expected_order_statistic",
    "expected_proposer_rank",
    "expected_random_top_pick",
    "expected_total_rank",
    "floor_formula_shortlist_size",
    "ideal_schedule",
    "ideal_shortlist_size",
    "optimal_integer_schedule",
    "optimal_shortlist_size",
    "rank_gap_report",
    "schedule_report",
    "worst_case_probabilities",
]

__version__ = "0.1.0"
