#!/usr/bin/env python3
"""Play one full narrowing session with seeded random participants.

Every participant draws a uniform preference order, then truthfully
keeps her favorites at her turn. The final report compares realized
ranks with the exact expectations for the schedule.

    python3 scripts/demo_session.py --items 12 --people 3 --seed 7
    python3 scripts/demo_session.py --labels pie,cake,flan --people 2
"""

import argparse
from typing import Optional

import numpy as np

from shortlist.exactmath import decimal_string
from shortlist.session import SessionStore, menu_from_labels
from shortlist.simulate import random_permutation


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=12, help="menu size")
    parser.add_argument(
        "--labels", default=None, help="comma-separated labels (overrides --items)"
    )
    parser.add_argument("--people", type=int, default=3)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument(
        "--log", default=None, help="append events to this JSONL file"
    )
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    if args.labels:
        labels = [part.strip() for part in args.labels.split(",") if part.strip()]
    else:
        labels = ["dish-%d" % (i + 1) for i in range(args.items)]
    if args.people < 1:
        raise SystemExit("--people must be at least 1")

    seed: Optional[int] = args.seed
    if seed is None:
        seed = int(np.random.default_rng().integers(0, 2**63))
        print("seed not given; using %d" % seed)
    rng = np.random.default_rng(seed)

    menu = menu_from_labels(labels)
    store = SessionStore(log_path=args.log)
    state = store.create_session(
        menu=menu,
        participants=["person-%d" % i for i in range(args.people)],
    )
    sid = state.session_id
    print("session %s, schedule %s" % (sid, " -> ".join(map(str, state.schedule.sizes))))

    rankings = [random_permutation(menu.size, rng) for _ in range(args.people)]

    while state.status == "awaiting_shortlist":
        mover = state.turn
        ranking = rankings[mover]
        keep = state.schedule.sizes[mover + 1]
        picked = sorted(
            state.offered, key=lambda item: ranking[menu.position_of(item)]
        )[:keep]
        state = store.submit_shortlist(sid, mover, picked, "demo-%d" % mover)
        shown = ", ".join(
            "%s(rank %d)" % (i, ranking[menu.position_of(i)]) for i in picked
        )
        print("person %d keeps %s" % (mover, shown))

    report = store.session_report(sid, rankings=rankings)
    print("final choice: %s" % report.final_label)
    assert report.realized_ranks is not None and report.realized_total is not None
    for i, (realized, expected) in enumerate(
        zip(report.realized_ranks, report.expected_ranks)
    ):
        print(
            "person %d: realized rank %d, expected %s"
            % (i, realized, decimal_string(expected, 3))
        )
    print(
        "total: realized %d, expected %s"
        % (report.realized_total, decimal_string(report.expected_total, 3))
    )


if __name__ == "__main__":
    main()
