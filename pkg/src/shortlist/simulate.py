"""Seeded Monte Carlo runs of the narrowing protocol at any scale.

Each trial draws fresh independent uniform rankings (person 1 pinned to
the identity, which loses no generality), walks the schedule, and
records every participant's realized rank of the final item. All
accumulation is in exact integers, so a summary is a pure function of
the config: same seed, same numbers, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .theory import ShortlistSchedule

# Fixed memory budget for one chunk of trials, in matrix cells. Part of
# the reproducibility contract: the chunking must depend only on the
# config, never on the machine.
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class SimulationConfig:
    menu_size: int
    schedule: ShortlistSchedule
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.schedule.menu_size != self.menu_size:
            raise ValueError(
                "schedule starts at %d, not menu size %d"
                % (self.schedule.menu_size, self.menu_size)
            )
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SimulationSummary:
    """Empirical moments of realized ranks over all trials.

    `mean_abs_diff` and the second-moment fields describe |R_2 - R_1|
    and (R_2 - R_1)^2 and are populated for two-participant runs only.
    """

    mean_rank_per_person: tuple[float, ...]
    standard_error_per_person: tuple[float, ...]
    mean_total: float
    mean_abs_diff: float | None
    empirical_second_moment_diff: float | None
    second_moment_diff_se: float | None
    trials: int
    seed: int


def random_permutation(n: int, rng: np.random.Generator) -> list[int]:
    """One uniform permutation of 1..n from the supplied generator."""
    if n < 1:
        raise ValueError("permutation length must be at least 1")
    return [int(v) + 1 for v in rng.permutation(n)]


def _mean_and_se(total: int, total_sq: int, trials: int) -> tuple[float, float]:
    mean = total / trials
    if trials < 2:
        return mean, 0.0
    var = (total_sq - total * total / trials) / (trials - 1)
    if var < 0.0:
        var = 0.0
    return mean, (var / trials) ** 0.5


def simulate(config: SimulationConfig) -> SimulationSummary:
    n = config.menu_size
    sizes = config.schedule.sizes
    s = config.schedule.people
    trials = config.trials
    rng = np.random.default_rng(config.seed)
    chunk = max(1, min(trials, _CHUNK_CELLS // (n * max(1, s - 1))))

    rank_sum = [0] * s
    rank_sqsum = [0] * s
    abs_diff_sum = 0
    diff_sq_sum = 0
    diff_4th_sum = 0

    rows_cache = np.arange(chunk)
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        rows = rows_cache[:m]

        # Person 1 keeps her top sizes[1] items of the identity ranking.
        mask = np.zeros((m, n), dtype=bool)
        mask[:, : sizes[1]] = True

        # Later people compare items by fresh uniform scores; smaller
        # score means better liked. Scores are kept to read off the
        # final item's rank once it is known.
        scores: list[np.ndarray] = []
        for keep in sizes[2:]:
            u = rng.random((m, n))
            scores.append(u)
            masked = np.where(mask, u, 2.0)
            kept = np.argpartition(masked, keep - 1, axis=1)[:, :keep]
            mask = np.zeros((m, n), dtype=bool)
            np.put_along_axis(mask, kept, True, axis=1)

        final = np.argmax(mask, axis=1)

        ranks = np.empty((s, m), dtype=np.int64)
        ranks[0] = final + 1
        for j, u in enumerate(scores, start=1):
            final_score = u[rows, final]
            ranks[j] = 1 + np.sum(u < final_score[:, None], axis=1)

        for j in range(s):
            rank_sum[j] += int(ranks[j].sum())
            rank_sqsum[j] += int((ranks[j] * ranks[j]).sum())
        if s == 2:
            diff = ranks[1] - ranks[0]
            sq = diff * diff
            abs_diff_sum += int(np.abs(diff).sum())
            diff_sq_sum += int(sq.sum())
            diff_4th_sum += int((sq * sq).sum())
        done += m

    means = []
    errors = []
    for j in range(s):
        mean, se = _mean_and_se(rank_sum[j], rank_sqsum[j], trials)
        means.append(mean)
        errors.append(se)

    mean_abs_diff = None
    second_moment = None
    second_moment_se = None
    if s == 2:
        mean_abs_diff = abs_diff_sum / trials
        second_moment, second_moment_se = _mean_and_se(
            diff_sq_sum, diff_4th_sum, trials
        )

    total = 0.0
    for mean in means:
        total += mean

    return SimulationSummary(
        mean_rank_per_person=tuple(means),
        standard_error_per_person=tuple(errors),
        mean_total=total,
        mean_abs_diff=mean_abs_diff,
        empirical_second_moment_diff=second_moment,
        second_moment_diff_se=second_moment_se,
        trials=trials,
        seed=config.seed,
    )


def two_party_config(
    menu_size: int, shortlist_size: int, trials: int, seed: int
) -> SimulationConfig:
    """Config for the proposer/chooser special case."""
    if not 1 <= shortlist_size <= menu_size:
        raise ValueError("shortlist size must lie in 1..menu size")
    return SimulationConfig(
        menu_size=menu_size,
        schedule=ShortlistSchedule(sizes=(menu_size, shortlist_size, 1)),
        trials=trials,
        seed=seed,
    )
