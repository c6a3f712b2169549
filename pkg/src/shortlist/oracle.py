"""Brute-force ground truth by full permutation enumeration.

Everything here recomputes, slowly and from first principles, what the
closed forms in `theory` claim: the expected minimum rank sum over all
permutations (OEIS A129591 divided by N!), exact protocol outcome
distributions for small menus, and two single-permutation baseline
selectors. By symmetry one participant's ranking is always fixed to the
identity, so items are named by that participant's rank 1..N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Sequence

from .exactmath import factorial
from .theory import ShortlistSchedule

TWO_PARTY_CAP = 8
MULTI_PARTY_MENU_CAP = 6
MULTI_PARTY_PEOPLE_CAP = 3


@dataclass(frozen=True)
class PairRanks:
    """Both participants' ranks of one menu item."""

    proposer_rank: int
    chooser_rank: int


@dataclass(frozen=True)
class OracleResult:
    """Sum of minimum rank sums over all N! permutations, and its mean."""

    menu_size: int
    total_sum: int
    expectation: Fraction


def _check_permutation(p: Sequence[int]) -> None:
    n = len(p)
    if n < 1:
        raise ValueError("permutation must be non-empty")
    seen = [False] * n
    for r in p:
        if not isinstance(r, int) or not 1 <= r <= n or seen[r - 1]:
            raise ValueError("not a permutation of 1..%d: %r" % (n, list(p)))
        seen[r - 1] = True


def borda_min_of_permutation(p: Sequence[int]) -> tuple[int, PairRanks]:
    """Minimum rank sum over items, given the chooser's permutation.

    The proposer's ranking is the identity, so item i carries rank sum
    i + p[i-1]. Returns the minimum and the first item attaining it in
    ascending proposer-rank order.
    """
    _check_permutation(p)
    best_sum = None
    best_pair = None
    for i, r in enumerate(p, start=1):
        if best_sum is None or i + r < best_sum:
            best_sum = i + r
            best_pair = PairRanks(proposer_rank=i, chooser_rank=r)
    assert best_sum is not None and best_pair is not None
    return best_sum, best_pair


def a129591_closed(menu_size: int) -> int:
    """Closed form for OEIS A129591, the sum over all permutations of
    the minimum rank sum: sum over i of (N-i+1) * i! * ((i+1)^(N-i) - i^(N-i)).
    """
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    n = menu_size
    return sum(
        (n - i + 1) * factorial(i) * ((i + 1) ** (n - i) - i ** (n - i))
        for i in range(n)
    )


def a129591_brute(menu_size: int, cap: int = 10) -> int:
    """A129591 by enumerating all N! permutations. Refuses N above cap."""
    if menu_size < 1:
        raise ValueError("menu size must be at least 1")
    if menu_size > cap:
        raise ValueError(
            "menu size %d exceeds enumeration cap %d" % (menu_size, cap)
        )
    n = menu_size
    total = 0
    for p in permutations(range(1, n + 1)):
        total += min(i + r for i, r in enumerate(p, start=1))
    return total


def borda_expected(menu_size: int) -> Fraction:
    """Expected minimum rank sum under full information: A129591(N)/N!."""
    return Fraction(a129591_closed(menu_size), factorial(menu_size))


def borda_oracle(menu_size: int) -> OracleResult:
    total = a129591_closed(menu_size)
    return OracleResult(
        menu_size=menu_size,
        total_sum=total,
        expectation=Fraction(total, factorial(menu_size)),
    )


def exhaustive_two_party(
    menu_size: int, shortlist_size: int
) -> tuple[Fraction, Fraction, dict[PairRanks, Fraction]]:
    """Exact two-party protocol outcome law by full enumeration.

    Fixes the proposer to the identity (she offers items 1..K) and runs
    the protocol against every chooser permutation. Returns the
    proposer's and chooser's expected ranks and the joint distribution
    of the (proposer, chooser) rank pair.
    """
    n, k = menu_size, shortlist_size
    if not 1 <= k <= n:
        raise ValueError("shortlist size must lie in 1..menu size")
    if n > TWO_PARTY_CAP:
        raise ValueError(
            "menu size %d exceeds enumeration cap %d" % (n, TWO_PARTY_CAP)
        )
    counts: dict[PairRanks, int] = {}
    proposer_sum = 0
    chooser_sum = 0
    for q in permutations(range(1, n + 1)):
        # q[i-1] is the chooser's rank of item i; she takes the offered
        # item she ranks best.
        offered = q[:k]
        chooser_rank = min(offered)
        proposer_rank = offered.index(chooser_rank) + 1
        proposer_sum += proposer_rank
        chooser_sum += chooser_rank
        pair = PairRanks(proposer_rank, chooser_rank)
        counts[pair] = counts.get(pair, 0) + 1
    denom = factorial(n)
    joint = {pair: Fraction(c, denom) for pair, c in counts.items()}
    return Fraction(proposer_sum, denom), Fraction(chooser_sum, denom), joint


def exhaustive_multi_party(
    menu_size: int, schedule: ShortlistSchedule
) -> list[Fraction]:
    """Exact per-person expected ranks by enumerating all ranking profiles.

    Person 1 is fixed to the identity; persons 2..s range over all N!
    permutations each. Everyone truthfully keeps her best C_i of the
    C_{i-1} items offered to her.
    """
    n, s = menu_size, schedule.people
    if schedule.menu_size != n:
        raise ValueError("schedule starts at %d, not menu size %d" % (schedule.menu_size, n))
    if n > MULTI_PARTY_MENU_CAP:
        raise ValueError(
            "menu size %d exceeds enumeration cap %d" % (n, MULTI_PARTY_MENU_CAP)
        )
    if s > MULTI_PARTY_PEOPLE_CAP:
        raise ValueError(
            "%d participants exceed enumeration cap %d" % (s, MULTI_PARTY_PEOPLE_CAP)
        )
    sizes = schedule.sizes
    rank_sums = [0] * s
    profiles = 0
    all_perms = list(permutations(range(1, n + 1)))
    for others in product(all_perms, repeat=s - 1):
        # Person 1 keeps her top C_1 of the full identity-ranked menu.
        current: Iterable[int] = range(1, sizes[1] + 1)
        for q, keep in zip(others, sizes[2:]):
            current = sorted(current, key=lambda item: q[item - 1])[:keep]
        (final,) = tuple(current)
        profiles += 1
        rank_sums[0] += final
        for j, q in enumerate(others, start=1):
            rank_sums[j] += q[final - 1]
    return [Fraction(t, profiles) for t in rank_sums]


def fairness_first_baseline(p: Sequence[int]) -> PairRanks:
    """Pick the item whose two ranks are closest, given the chooser's
    permutation (proposer fixed to identity).

    Ties on |difference| break by smaller rank sum, then by smaller
    proposer rank.
    """
    _check_permutation(p)
    best = None
    best_key = None
    for i, r in enumerate(p, start=1):
        key = (abs(r - i), i + r, i)
        if best_key is None or key < best_key:
            best_key = key
            best = PairRanks(proposer_rank=i, chooser_rank=r)
    assert best is not None
    return best
