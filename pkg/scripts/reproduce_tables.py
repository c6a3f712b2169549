#!/usr/bin/env python3
"""Regenerate every published table from the package's exact formulas.

Run from anywhere after installing the package:

    python3 scripts/reproduce_tables.py
"""

import math

from shortlist.exactmath import decimal_string
from shortlist.oracle import a129591_closed, borda_expected
from shortlist.theory import (
    ideal_schedule,
    ideal_shortlist_size,
    optimal_integer_schedule,
    optimal_shortlist_size,
)


def permutation_sums() -> None:
    print("minimum rank sums over all permutations, and their means")
    print("  n   sum over n! orders   expected minimum")
    for n in range(1, 11):
        print(
            "  %-3d %-20d %s"
            % (n, a129591_closed(n), decimal_string(borda_expected(n), 4))
        )


def method_comparison() -> None:
    print("expected total rank by method")
    print("  n   full info   ideal size          integer size")
    for n in range(1, 11):
        full = decimal_string(borda_expected(n), 3)
        ideal_total = math.sqrt(2.0 * n + 2.0)
        ideal_size = ideal_shortlist_size(n)
        optimum = optimal_shortlist_size(n)
        size_text = " or ".join(str(c) for c in optimum.candidates)
        print(
            "  %-3d %-11s %.3f (size %.3f) %s (size %s)"
            % (
                n,
                full,
                ideal_total,
                ideal_size,
                decimal_string(optimum.expected_total, 3),
                size_text,
            )
        )


def optimal_sizes() -> None:
    print("integer-optimal shortlist sizes (ties shown in full)")
    print("  n    size")
    for n in range(1, 44):
        optimum = optimal_shortlist_size(n)
        print("  %-4d %s" % (n, " or ".join(str(c) for c in optimum.candidates)))


def twelve_item_schedule() -> None:
    print("narrowing schedule for 12 items, 3 participants")
    real = ideal_schedule(12, 3)
    best, report = optimal_integer_schedule(12, 3)
    print("  real sizes    %s" % ", ".join("%.4f" % c for c in real))
    print("  integer sizes %s" % " -> ".join(str(c) for c in best.sizes))
    for i, value in enumerate(report.per_person):
        print("  person %d      %s (exact %s)" % (i, decimal_string(value, 4), value))
    print(
        "  total         %s (exact %s)"
        % (decimal_string(report.expected_total, 4), report.expected_total)
    )
    print("  ideal common rank %.4f" % report.ideal_common_rank)


def main() -> None:
    permutation_sums()
    print()
    method_comparison()
    print()
    optimal_sizes()
    print()
    twelve_item_schedule()


if __name__ == "__main__":
    main()
