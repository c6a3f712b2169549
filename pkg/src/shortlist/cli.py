"""Command-line front end: analysis tables, oracle checks, simulation
runs, and the HTTP server.

Exit codes: 0 success, 1 usage error, 2 verification failure (an
oracle mismatch or a simulation far outside its statistical band).
"""

from __future__ import annotations

import csv
import io
import json
import math
import secrets
import socket
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

import click

from . import oracle, theory
from .exactmath import decimal_string
from .simulate import SimulationConfig, simulate as run_simulation

ANALYZE_MENU_CAP = 2000
ANALYZE_PEOPLE_CAP = 50
FULL_INFO_CAP = 20
ORACLE_BRUTE_CAP = 8
HARD_Z_LIMIT = 6.0


class VerificationFailure(click.ClickException):
    exit_code = 2


def _echo_csv(rows: list[list[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    click.echo(buf.getvalue(), nl=False)


def _echo_json(obj: Any) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _rat(value: Fraction) -> dict[str, str]:
    return {
        "num": str(value.numerator),
        "den": str(value.denominator),
        "decimal": decimal_string(value, 12),
    }


@click.group(invoke_without_command=True)
@click.pass_context
def cli(ctx: click.Context) -> None:
    """Shared-choice protocol toolkit."""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Menu size.")
@click.option("--k", "k", type=int, default=None, help="Two-party shortlist size.")
@click.option("--s", "s", type=int, default=None, help="Participant count.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["table", "json", "csv"]),
    default="table",
    show_default=True,
)
def analyze(n: int, k: Optional[int], s: Optional[int], fmt: str) -> None:
    """Expected-rank analysis: method comparison, one two-party
    setting (--k), or a full multi-party schedule (--s)."""
    if n < 1:
        raise click.UsageError("--n must be at least 1")
    if k is not None and s is not None:
        raise click.UsageError("use at most one of --k / --s")
    if k is not None:
        if not 1 <= k <= n:
            raise click.UsageError("--k must lie in 1..n")
        _analyze_two_party(n, k, fmt)
    elif s is not None:
        if s < 1:
            raise click.UsageError("--s must be at least 1")
        if n > ANALYZE_MENU_CAP or s > ANALYZE_PEOPLE_CAP:
            raise click.UsageError(
                "schedule search is capped at n <= %d, s <= %d"
                % (ANALYZE_MENU_CAP, ANALYZE_PEOPLE_CAP)
            )
        _analyze_schedule(n, s, fmt)
    else:
        _analyze_methods(n, fmt)


def _analyze_methods(n: int, fmt: str) -> None:
    full_info = oracle.borda_expected(n) if n <= FULL_INFO_CAP else None
    ideal_size = theory.ideal_shortlist_size(n)
    ideal_total = math.sqrt(2.0 * n + 2.0)
    optimum = theory.optimal_shortlist_size(n)
    if fmt == "json":
        _echo_json(
            {
                "menu_size": n,
                "full_information": _rat(full_info) if full_info is not None else None,
                "ideal_size": {"size": ideal_size, "expected_total": ideal_total},
                "integer_size": {
                    "size": optimum.canonical,
                    "candidates": list(optimum.candidates),
                    "tie": optimum.tie,
                    "expected_total": _rat(optimum.expected_total),
                },
            }
        )
        return
    if fmt == "csv":
        rows: list[list[Any]] = [
            ["method", "size", "expected_total", "num", "den"]
        ]
        if full_info is not None:
            rows.append(
                [
                    "full_information",
                    "",
                    decimal_string(full_info, 12),
                    full_info.numerator,
                    full_info.denominator,
                ]
            )
        rows.append(["ideal_size", repr(ideal_size), repr(ideal_total), "", ""])
        rows.append(
            [
                "integer_size",
                optimum.canonical,
                decimal_string(optimum.expected_total, 12),
                optimum.expected_total.numerator,
                optimum.expected_total.denominator,
            ]
        )
        _echo_csv(rows)
        return
    click.echo("menu size %d: expected total rank by method" % n)
    if full_info is not None:
        click.echo(
            "  full information   %s  (exact %s)"
            % (decimal_string(full_info, 3), full_info)
        )
    else:
        click.echo(
            "  full information   -      (menu above closed-form cap %d)"
            % FULL_INFO_CAP
        )
    click.echo(
        "  ideal size          %.3f  (size %.3f)" % (ideal_total, ideal_size)
    )
    tie_note = (
        "  (tie: %s)" % " or ".join(str(c) for c in optimum.candidates)
        if optimum.tie
        else ""
    )
    click.echo(
        "  integer size        %s  (size %d)%s"
        % (
            decimal_string(optimum.expected_total, 3),
            optimum.canonical,
            tie_note,
        )
    )


def _analyze_two_party(n: int, k: int, fmt: str) -> None:
    params = theory.TwoPartyParams(menu_size=n, shortlist_size=k)
    report = theory.rank_gap_report(params)
    chooser_worst, both_worst = theory.worst_case_probabilities(params)
    if fmt == "json":
        _echo_json(
            {
                "menu_size": n,
                "shortlist_size": k,
                "expected_chooser_rank": _rat(report.expected_chooser_rank),
                "expected_proposer_rank": _rat(report.expected_proposer_rank),
                "expected_total": _rat(report.expected_total),
                "fairness_gap": _rat(report.fairness_gap),
                "gap_second_moment": _rat(report.gap_second_moment),
                "gap_variance": _rat(report.gap_variance),
                "sigma_bound": report.sigma_bound,
                "chooser_worst_probability": _rat(chooser_worst),
                "both_worst_probability": _rat(both_worst),
            }
        )
        return
    named: list[tuple[str, Fraction]] = [
        ("E(chooser rank)", report.expected_chooser_rank),
        ("E(proposer rank)", report.expected_proposer_rank),
        ("E(total)", report.expected_total),
        ("fairness gap", report.fairness_gap),
        ("E(gap^2)", report.gap_second_moment),
        ("Var(gap)", report.gap_variance),
        ("P(chooser worst)", chooser_worst),
        ("P(both worst)", both_worst),
    ]
    if fmt == "csv":
        rows = [["quantity", "decimal", "num", "den"]]
        for name, value in named:
            rows.append(
                [name, decimal_string(value, 12), value.numerator, value.denominator]
            )
        rows.append(["sigma bound", repr(report.sigma_bound), "", ""])
        _echo_csv(rows)
        return
    click.echo("menu size %d, shortlist size %d" % (n, k))
    for name, value in named:
        click.echo(
            "  %-18s %8s  (exact %s)" % (name, decimal_string(value, 3), value)
        )
    click.echo("  %-18s %8.3f" % ("sigma bound", report.sigma_bound))


def _analyze_schedule(n: int, s: int, fmt: str) -> None:
    real = theory.ideal_schedule(n, s)
    best, report = theory.optimal_integer_schedule(n, s)
    if fmt == "json":
        _echo_json(
            {
                "menu_size": n,
                "people": s,
                "real_sizes": real,
                "ideal_common_rank": report.ideal_common_rank,
                "integer": {
                    "sizes": list(best.sizes),
                    "per_person": [_rat(v) for v in report.per_person],
                    "expected_total": _rat(report.expected_total),
                },
            }
        )
        return
    if fmt == "csv":
        rows = [["person", "offered", "keeps", "expected_rank", "num", "den"]]
        for i, value in enumerate(report.per_person):
            rows.append(
                [
                    i,
                    best.sizes[i],
                    best.sizes[i + 1],
                    decimal_string(value, 12),
                    value.numerator,
                    value.denominator,
                ]
            )
        rows.append(
            [
                "total",
                "",
                "",
                decimal_string(report.expected_total, 12),
                report.expected_total.numerator,
                report.expected_total.denominator,
            ]
        )
        _echo_csv(rows)
        return
    click.echo("menu size %d, %d participants" % (n, s))
    click.echo(
        "  real sizes      %s" % ", ".join("%.3f" % c for c in real)
    )
    click.echo(
        "  integer sizes   %s" % " -> ".join(str(c) for c in best.sizes)
    )
    for i, value in enumerate(report.per_person):
        click.echo(
            "  person %-2d       %s  (exact %s)"
            % (i, decimal_string(value, 3), value)
        )
    click.echo(
        "  expected total  %s  (exact %s)"
        % (decimal_string(report.expected_total, 3), report.expected_total)
    )
    click.echo("  ideal common rank %.3f" % report.ideal_common_rank)


@cli.command(name="oracle")
@click.option("--n", "n", type=int, required=True, help="Menu size.")
def oracle_cmd(n: int) -> None:
    """Check the closed-form permutation sum against brute force."""
    if n < 1:
        raise click.UsageError("--n must be at least 1")
    closed = oracle.a129591_closed(n)
    expectation = oracle.borda_expected(n)
    click.echo("closed formula  %d" % closed)
    click.echo(
        "expectation     %s = %s" % (expectation, decimal_string(expectation, 6))
    )
    if n > ORACLE_BRUTE_CAP:
        click.echo(
            "brute force     skipped (menu above enumeration cap %d)"
            % ORACLE_BRUTE_CAP
        )
        return
    brute = oracle.a129591_brute(n)
    click.echo("brute force     %d" % brute)
    if brute == closed:
        click.echo("verdict         MATCH")
    else:
        click.echo("verdict         MISMATCH")
        raise VerificationFailure(
            "brute force %d != closed formula %d" % (brute, closed)
        )


@cli.command(name="simulate")
@click.option("--n", "n", type=int, required=True, help="Menu size.")
@click.option("--k", "k", type=int, default=None, help="Two-party shortlist size.")
@click.option(
    "--schedule",
    "schedule_text",
    default=None,
    help="Comma-separated interior sizes C_1,..,C_{s-1} (final 1 implied).",
)
@click.option("--trials", type=int, required=True, help="Number of trials.")
@click.option("--seed", type=int, default=None, help="RNG seed (random if omitted).")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["table", "json", "csv"]),
    default="table",
    show_default=True,
)
def simulate_cmd(
    n: int,
    k: Optional[int],
    schedule_text: Optional[str],
    trials: int,
    seed: Optional[int],
    fmt: str,
) -> None:
    """Monte Carlo protocol runs checked against the exact values."""
    if n < 1:
        raise click.UsageError("--n must be at least 1")
    if trials < 1:
        raise click.UsageError("--trials must be at least 1")
    if k is not None and schedule_text is not None:
        raise click.UsageError("use at most one of --k / --schedule")
    if seed is None:
        seed = secrets.randbits(63)
        click.echo("seed not given; using %d" % seed)
    if not 0 <= seed < 2**64:
        raise click.UsageError("--seed must fit in 64 unsigned bits")

    if schedule_text is not None:
        try:
            interior = [int(part) for part in schedule_text.split(",") if part != ""]
            schedule = theory.ShortlistSchedule(sizes=(n, *interior, 1))
        except ValueError as exc:
            raise click.UsageError("bad --schedule: %s" % exc)
    else:
        size = k if k is not None else theory.optimal_shortlist_size(n).canonical
        if not 1 <= size <= n:
            raise click.UsageError("--k must lie in 1..n")
        schedule = theory.ShortlistSchedule(sizes=(n, size, 1))

    config = SimulationConfig(
        menu_size=n, schedule=schedule, trials=trials, seed=seed
    )
    summary = run_simulation(config)
    exact = theory.schedule_report(schedule)

    z_scores: list[Optional[float]] = []
    hard_fail = False
    for mean, se, target in zip(
        summary.mean_rank_per_person,
        summary.standard_error_per_person,
        exact.per_person,
    ):
        if se > 0.0:
            z: Optional[float] = (mean - float(target)) / se
        else:
            z = 0.0 if mean == float(target) else None
        z_scores.append(z)
        if z is None or abs(z) > HARD_Z_LIMIT:
            hard_fail = True

    two_party = schedule.people == 2
    exact_sq: Optional[Fraction] = None
    sq_z: Optional[float] = None
    if two_party:
        exact_sq = theory.rank_gap_report(
            theory.TwoPartyParams(menu_size=n, shortlist_size=schedule.sizes[1])
        ).gap_second_moment
        assert summary.empirical_second_moment_diff is not None
        assert summary.second_moment_diff_se is not None
        if summary.second_moment_diff_se > 0.0:
            sq_z = (
                summary.empirical_second_moment_diff - float(exact_sq)
            ) / summary.second_moment_diff_se
            if abs(sq_z) > HARD_Z_LIMIT:
                hard_fail = True

    if fmt == "json":
        _echo_json(
            {
                "menu_size": n,
                "schedule": list(schedule.sizes),
                "trials": trials,
                "seed": seed,
                "per_person": [
                    {
                        "mean": mean,
                        "standard_error": se,
                        "exact": _rat(target),
                        "z": z,
                    }
                    for mean, se, target, z in zip(
                        summary.mean_rank_per_person,
                        summary.standard_error_per_person,
                        exact.per_person,
                        z_scores,
                    )
                ],
                "mean_total": summary.mean_total,
                "exact_total": _rat(exact.expected_total),
                "mean_abs_diff": summary.mean_abs_diff,
                "empirical_second_moment_diff": summary.empirical_second_moment_diff,
                "exact_second_moment_diff": _rat(exact_sq) if exact_sq is not None else None,
                "second_moment_z": sq_z,
            }
        )
    elif fmt == "csv":
        rows = [["person", "mean", "standard_error", "exact_num", "exact_den", "z"]]
        for i, (mean, se, target, z) in enumerate(
            zip(
                summary.mean_rank_per_person,
                summary.standard_error_per_person,
                exact.per_person,
                z_scores,
            )
        ):
            rows.append(
                [
                    i,
                    repr(mean),
                    repr(se),
                    target.numerator,
                    target.denominator,
                    "" if z is None else repr(z),
                ]
            )
        _echo_csv(rows)
    else:
        click.echo(
            "schedule %s, %d trials, seed %d"
            % (" -> ".join(str(c) for c in schedule.sizes), trials, seed)
        )
        click.echo("  person       mean        se     exact         z")
        for i, (mean, se, target, z) in enumerate(
            zip(
                summary.mean_rank_per_person,
                summary.standard_error_per_person,
                exact.per_person,
                z_scores,
            )
        ):
            click.echo(
                "  %-6d %9.4f %9.5f %9.4f %9.2f"
                % (i, mean, se, float(target), float("nan") if z is None else z)
            )
        click.echo(
            "  total  %9.4f            %9.4f"
            % (summary.mean_total, float(exact.expected_total))
        )
        if two_party and exact_sq is not None:
            assert summary.mean_abs_diff is not None
            report = theory.rank_gap_report(
                theory.TwoPartyParams(menu_size=n, shortlist_size=schedule.sizes[1])
            )
            click.echo(
                "  mean |gap| %.4f  (sigma bound %.4f)"
                % (summary.mean_abs_diff, report.sigma_bound)
            )
            click.echo(
                "  mean gap^2 %.4f  exact %.4f  z %s"
                % (
                    summary.empirical_second_moment_diff,
                    float(exact_sq),
                    "n/a" if sq_z is None else "%.2f" % sq_z,
                )
            )

    if hard_fail:
        raise VerificationFailure(
            "simulation diverges from exact values by more than %.0f"
            " standard errors" % HARD_Z_LIMIT
        )


@cli.command()
@click.option(
    "--host",
    default=None,
    help="Bind address (env SHORTLIST_HOST, default 127.0.0.1).",
)
@click.option(
    "--port",
    type=int,
    default=None,
    help="TCP port, 0 for ephemeral (env SHORTLIST_PORT, default 8000).",
)
@click.option(
    "--log",
    "log_path",
    default=None,
    help="Session event-log file (env SHORTLIST_LOG, default none).",
)
def serve(host: Optional[str], port: Optional[int], log_path: Optional[str]) -> None:
    """Run the HTTP API until interrupted."""
    import os

    import uvicorn

    from .api import create_app
    from .session import SessionStore

    host = host if host is not None else os.environ.get("SHORTLIST_HOST", "127.0.0.1")
    if port is None:
        port = int(os.environ.get("SHORTLIST_PORT", "8000"))
    if log_path is None:
        log_path = os.environ.get("SHORTLIST_LOG") or None

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise click.ClickException("cannot bind %s:%d: %s" % (host, port, exc))
    bound_port = sock.getsockname()[1]
    click.echo("listening on http://%s:%d" % (host, bound_port))
    sys.stdout.flush()

    app = create_app(SessionStore(log_path=log_path))
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name="shortlist", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
