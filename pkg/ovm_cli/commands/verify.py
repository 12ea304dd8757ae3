"""``ovm verify`` - seeded property suites."""

from __future__ import annotations

import time

import click
from rich.console import Console

from ..config import DEFAULT_DIM_MAX, DEFAULT_SEED, DEFAULT_TRIALS
from ..report import RunReport, current_settings, finish
from ..suites import (
    SUITE_NAMES,
    SuiteConfig,
    render_report_card,
    render_results_table,
    run_suites,
)

console = Console()


@click.command()
@click.option(
    "--suite",
    type=click.Choice(["all", *SUITE_NAMES]),
    default="all",
    show_default=True,
    help="Suite to run.",
)
@click.option("--trials", type=click.IntRange(min=1), default=DEFAULT_TRIALS, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option(
    "--dim-max",
    "dim_max",
    type=click.IntRange(min=1),
    default=DEFAULT_DIM_MAX,
    show_default=True,
    help="Largest Hilbert-space dimension for random instances.",
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=None,
    help="Worker threads (default: OVM_WORKERS or 1). Results do not depend on it.",
)
@click.pass_context
def verify(
    ctx: click.Context,
    suite: str,
    trials: int,
    seed: int,
    dim_max: int,
    workers: int | None,
) -> None:
    """Run the randomized operator-inequality and characterization suites.

    Every random instance is derived from (seed, suite, trial), so the
    report is identical for any number of workers.

    \b
        ovm verify --suite kadison --trials 200
        ovm --json verify --seed 7
    """
    settings = current_settings(ctx)
    cfg = SuiteConfig(
        trials=trials,
        seed=seed,
        dim_max=dim_max,
        workers=workers or settings.workers,
        tol=settings.tol,
    )
    report = RunReport(command="verify")
    report.inputs = {
        "suite": suite,
        "trials": str(trials),
        "seed": str(seed),
        "dim_max": str(dim_max),
    }

    started = time.perf_counter()
    results = run_suites(suite, cfg)
    elapsed = time.perf_counter() - started

    for r in results:
        report.record_residual(r.key, r.max_residual)
        for message in r.failures:
            report.violation(f"{r.key}: {message}")
    report.results = {r.key: r.to_dict() for r in results}

    if not settings.json_output:
        render_results_table(console, results)
        render_report_card(console, results)
        console.print(f"[dim]{elapsed:.1f}s[/dim]")
    finish(ctx, report, console)
