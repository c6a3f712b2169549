"""Closed-form analysis of the sequential shortlist protocol.

The two-party protocol: a *proposer* reveals her top K items from a
menu of N, and a *chooser* picks her own favourite among those K. Both
rank the menu independently and uniformly at random, and both act
truthfully. The s-party generalisation narrows the menu through a
schedule N = C_0 >= C_1 >= ... >= C_s = 1, each participant keeping
her top C_i of the C_{i-1} items offered to her.

All expectations here are exact rationals. Functions returning floats
(ideal real-valued sizes, the common balanced rank, the sigma bound)
are accurate to at least 12 significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import binomial, triangular_bracket


@dataclass(frozen=True)
class TwoPartyParams:
    """Menu size and shortlist size for the two-party protocol."""

    menu_size: int
    shortlist_size: int

    def __post_init__(self) -> None:
        if self.menu_size < 1:
            raise ValueError("menu size must be at least 1")
        if not 1 <= self.shortlist_size <= self.menu_size:
            raise ValueError("shortlist size must lie in 1..menu size")


@dataclass(frozen=True)
class RankDistribution:
    """Exact pmf of the chooser's rank of the shared item.

    The support is 1..N-K+1 and the probabilities sum to exactly 1.
    """

    menu_size: int
    shortlist_size: int
    pmf: dict[int, Fraction]

    def mean(self) -> Fraction:
        return sum((r * p for r, p in self.pmf.items()), Fraction(0))

    def second_moment(self) -> Fraction:
        return sum((r * r * p for r, p in self.pmf.items()), Fraction(0))


@dataclass(frozen=True)
class ProtocolReport:
    """Expected ranks and fairness moments for one two-party setting.

    `gap_second_moment` is the mean squared difference between the
    chooser's and proposer's realized ranks; `gap_variance` subtracts
    the squared mean gap. `sigma_bound` is sqrt(2(N+1)/3), the proven
    ceiling on the gap's standard deviation at the ideal shortlist size.
    """

    expected_chooser_rank: Fraction
    expected_proposer_rank: Fraction
    expected_total: Fraction
    fairness_gap: Fraction
    gap_second_moment: Fraction
    gap_variance: Fraction
    sigma_bound: float


@dataclass(frozen=True)
class ShortlistOptimum:
    """The integer shortlist size(s) minimizing expected total rank.

    `candidates` holds one size, or two when the menu sits exactly on a
    tie boundary (N+1 equal to a triangular number); `canonical` is the
    smaller candidate, preferred so the proposer reads less menu.
    """

    menu_size: int
    canonical: int
    candidates: tuple[int, ...]
    tie: bool
    expected_total: Fraction


@dataclass(frozen=True)
class ShortlistSchedule:
    """A narrowing schedule [C_0, C_1, ..., C_s] of offered-set sizes.

    C_0 is the menu size, C_s = 1, and sizes never increase. Repeats are
    legal (they correspond to a participant passing everything along).
    """

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.sizes) < 2:
            raise ValueError("schedule needs a start size and a final size")
        if any(c < 1 for c in self.sizes):
            raise ValueError("schedule sizes must be positive")
        if self.sizes[-1] != 1:
            raise ValueError("schedule must end at a single item")
        if any(a < b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("schedule sizes must be non-increasing")

    @property
    def menu_size(self) -> int:
        return self.sizes[0]

    @property
    def people(self) -> int:
        return len(self.sizes) - 1


@dataclass(frozen=True)
class MultiPartyReport:
    """Per-person expected ranks of the shared item under a schedule.

    Participant i sees C_{i-1} items and passes her top C_i onward, so
    her expected rank of the final item is (N+1)(C_i+1) / (2(C_{i-1}+1)),
    exactly, for any non-increasing schedule. `ideal_common_rank` is the
    balanced value ((N+1)/2)^(1-1/s) every participant would get under
    the (usually non-integer) ideal schedule.
    """

    schedule: ShortlistSchedule
    per_person: tuple[Fraction, ...]
    expected_total: Fraction
    ideal_common_rank: float


def chooser_rank_pmf(params: TwoPartyParams) -> RankDistribution:
    """Exact distribution of the chooser's rank of the shared item.

    The chooser ends up at rank d exactly when the proposer's K offered
    items consist of the chooser's rank-d item plus K-1 items the
    chooser likes less, hence P(d) = C(N-d, K-1) / C(N, K).
    """
    n, k = params.menu_size, params.shortlist_size
    denom = binomial(n, k)
    pmf = {d: Fraction(binomial(n - d, k - 1), denom) for d in range(1, n - k + 2)}
    return RankDistribution(menu_size=n, shortlist_size=k, pmf=pmf)


def expected_chooser_rank(params: TwoPartyParams) -> Fraction:
    """E of the chooser's rank: (N+1)/(K+1), exactly."""
    return Fraction(params.menu_size + 1, params.shortlist_size + 1)


def expected_proposer_rank(params: TwoPartyParams) -> Fraction:
    """E of the proposer's rank: (K+1)/2, exactly.

    The chooser is equally likely to favour any of the K offered items,
    so the proposer's rank of the shared item is uniform on 1..K.
    """
    return Fraction(params.shortlist_size + 1, 2)


def expected_total_rank(params: TwoPartyParams) -> Fraction:
    """E of the summed ranks: (N+1)/(K+1) + (K+1)/2, exactly."""
    return expected_chooser_rank(params) + expected_proposer_rank(params)


def ideal_shortlist_size(menu_size: int) -> float:
    """The real-valued shortlist size sqrt(2N+2) - 1.

    Minimizes expected total rank and makes the two expected ranks
    equal; usually not an integer.
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    return math.sqrt(2.0 * menu_size + 2.0) - 1.0


def optimal_shortlist_size(menu_size: int) -> ShortlistOptimum:
    """Best integer shortlist size via the triangular-number bracket.

    With m the index satisfying T(m-1) < N+1 <= T(m), the optimum is
    m-1; when N+1 lands exactly on T(m) both m-1 and m achieve the same
    total (m + 1/2) and the smaller is canonical.
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    bracket = triangular_bracket(menu_size + 1)
    canonical = bracket.m - 1
    tie = bracket.value == menu_size + 1
    candidates = (canonical, bracket.m) if tie else (canonical,)
    total = expected_total_rank(TwoPartyParams(menu_size, canonical))
    return ShortlistOptimum(
        menu_size=menu_size,
        canonical=canonical,
        candidates=candidates,
        tie=tie,
        expected_total=total,
    )


def floor_formula_shortlist_size(menu_size: int) -> int:
    """Canonical optimal shortlist size as floor((sqrt(8N+9)-1)/2).

    Independent of the triangular-bracket route; uses the exact integer
    square root so no float edge case can shift the floor.
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    return (math.isqrt(8 * menu_size + 9) - 1) // 2


def rank_gap_report(params: TwoPartyParams) -> ProtocolReport:
    """All first and second moments of the two realized ranks.

    The proposer's rank is uniform on 1..K, so its second moment is
    (K+1)(2K+1)/6; the chooser's second moment reduces to
    (N+1)(2N-K+2) / ((K+1)(K+2)). The two ranks are independent, which
    gives the mean squared gap as E(T^2) + E(D^2) - 2 E(T) E(D).
    """
    n, k = params.menu_size, params.shortlist_size
    e_chooser = expected_chooser_rank(params)
    e_proposer = expected_proposer_rank(params)
    chooser_sq = Fraction((n + 1) * (2 * n - k + 2), (k + 1) * (k + 2))
    proposer_sq = Fraction((k + 1) * (2 * k + 1), 6)
    gap = e_chooser - e_proposer
    gap_second = chooser_sq + proposer_sq - 2 * e_chooser * e_proposer
    return ProtocolReport(
        expected_chooser_rank=e_chooser,
        expected_proposer_rank=e_proposer,
        expected_total=e_chooser + e_proposer,
        fairness_gap=gap,
        gap_second_moment=gap_second,
        gap_variance=gap_second - gap * gap,
        sigma_bound=math.sqrt(2.0 * (n + 1) / 3.0),
    )


def worst_case_probabilities(params: TwoPartyParams) -> tuple[Fraction, Fraction]:
    """Chances of the protocol's worst outcomes.

    Returns (P(chooser lands at rank N-K+1), P(both land at their
    protocol-worst ranks)) = (1/C(N,K), 1/(K*C(N,K))). The chooser is
    worst off exactly when the offered set is her bottom K items; both
    are worst off when additionally the item she then picks is the
    proposer's K-th choice.
    """
    n, k = params.menu_size, params.shortlist_size
    subsets = binomial(n, k)
    return Fraction(1, subsets), Fraction(1, k * subsets)


def expected_order_statistic(menu_size: int, subset_size: int, index: int) -> Fraction:
    """E of the index-th smallest value in a uniform random subset.

    For a uniformly random subset of `subset_size` values drawn from
    1..N, the index-th order statistic has mean index*(N+1)/(subset_size+1).
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if not 1 <= subset_size <= menu_size:
        raise ValueError("subset size must lie in 1..menu size")
    if not 1 <= index <= subset_size:
        raise ValueError("index must lie in 1..subset size")
    return Fraction(index * (menu_size + 1), subset_size + 1)


def expected_random_top_pick(menu_size: int, subset_size: int, block_size: int) -> Fraction:
    """E of a uniform pick from the best `block_size` of a random subset.

    Averaging the first block_size order statistics of a random
    subset_size-subset of 1..N gives (N+1)(block_size+1) / (2(subset_size+1)).
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if not 1 <= subset_size <= menu_size:
        raise ValueError("subset size must lie in 1..menu size")
    if not 1 <= block_size <= subset_size:
        raise ValueError("block size must lie in 1..subset size")
    return Fraction((menu_size + 1) * (block_size + 1), 2 * (subset_size + 1))


def ideal_schedule(menu_size: int, people: int) -> list[float]:
    """Real-valued narrowing sizes giving every participant equal E(rank).

    C_i = 2^(i/s) * (N+1)^((s-i)/s) - 1. The endpoints come out exact:
    C_0 = N and C_s = 1. Interior values are usually irrational.
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if people < 1:
        raise ValueError("participant count must be at least 1")
    n, s = menu_size, people
    return [2.0 ** (i / s) * float(n + 1) ** ((s - i) / s) - 1.0 for i in range(s + 1)]


def common_expected_rank(menu_size: int, people: int) -> float:
    """The balanced per-person expected rank ((N+1)/2)^(1-1/s)."""
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if people < 1:
        raise ValueError("participant count must be at least 1")
    return ((menu_size + 1) / 2.0) ** (1.0 - 1.0 / people)


def schedule_report(schedule: ShortlistSchedule) -> MultiPartyReport:
    """Exact per-person expected ranks for any narrowing schedule."""
    n = schedule.menu_size
    per_person = tuple(
        Fraction((n + 1) * (cur + 1), 2 * (prev + 1))
        for prev, cur in zip(schedule.sizes, schedule.sizes[1:])
    )
    return MultiPartyReport(
        schedule=schedule,
        per_person=per_person,
        expected_total=sum(per_person, Fraction(0)),
        ideal_common_rank=common_expected_rank(n, schedule.people),
    )


def optimal_integer_schedule(
    menu_size: int, people: int
) -> tuple[ShortlistSchedule, MultiPartyReport]:
    """Best integer narrowing schedule by exhaustive dynamic program.

    Minimizes the exact expected total rank over every non-increasing
    integer chain N = C_0 >= C_1 >= ... >= C_s = 1; O(s * N^2) time.
    Ties resolve to the lexicographically smallest chain, so earlier
    participants offer fewer items. At s = 2 this always reproduces the
    canonical integer shortlist size.
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if people < 1:
        raise ValueError("participant count must be at least 1")
    n, s = menu_size, people
    half = Fraction(n + 1, 2)

    # tails[pos][c]: exact cost of rounds pos+1..s given C_pos = c.
    # The only size reachable at pos 0 is n itself.
    tails: dict[int, dict[int, Fraction]] = {s: {1: Fraction(0)}}
    for pos in range(s - 1, -1, -1):
        nxt_tail = tails[pos + 1]
        cur: dict[int, Fraction] = {}
        for c in (n,) if pos == 0 else range(1, n + 1):
            best: Fraction | None = None
            for nxt, t in nxt_tail.items():
                if nxt > c:
                    break
                cand = half * Fraction(nxt + 1, c + 1) + t
                if best is None or cand < best:
                    best = cand
            if best is not None:
                cur[c] = best
        tails[pos] = cur
    total = tails[0][n]

    # Forward pass: pick the smallest next size consistent with the optimum.
    sizes = [n]
    c, remaining = n, total
    for pos in range(1, s + 1):
        # tails keys ascend, so the first match is the smallest next size.
        for nxt, t in tails[pos].items():
            if nxt > c:
                raise AssertionError("schedule reconstruction failed")
            if half * Fraction(nxt + 1, c + 1) + t == remaining:
                sizes.append(nxt)
                c, remaining = nxt, t
                break
        else:
            raise AssertionError("schedule reconstruction failed")

    schedule = ShortlistSchedule(sizes=tuple(sizes))
    return schedule, schedule_report(schedule)
