"""``ovm fibonacci`` - the golden-ratio measure on S = [[0, 1], [1, 1]]."""

from __future__ import annotations

from pathlib import Path

import click
import numpy as np
from rich.console import Console
from rich.table import Table

from ..counterexample import fibonacci_example, fibonacci_numbers
from ..dilation import moment_via_dilation
from ..hermitian import approx_eq
from ..io_utils import atomic_write_json
from ..povm import is_spectral, moment, variance
from ..report import RunReport, current_settings, finish

console = Console()

EXPECTED_MATCHES = (2, 3)


@click.command()
@click.option(
    "--max-k",
    "max_k",
    type=click.IntRange(min=3),
    default=20,
    show_default=True,
    help="Largest power to tabulate.",
)
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the golden-ratio POVM document to this file.",
)
@click.pass_context
def fibonacci(ctx: click.Context, max_k: int, out_path: Path | None) -> None:
    """Tabulate (P S^k)_11 against the Fibonacci numbers.

    With T = 1 the compressed moments equal T^k exactly for k = 2 and 3 and
    for no other k, although the measure is not spectral.
    """
    settings = current_settings(ctx)
    report = RunReport(command="fibonacci")
    report.inputs = {"max_k": str(max_k)}

    example = fibonacci_example()
    fib = fibonacci_numbers(max_k + 1)
    rows = []
    matched = []
    for k in range(1, max_k + 1):
        value = float(np.real(moment_via_dilation(example.dilation, k).entry(0, 0)))
        expected = fib[k - 1]
        err = abs(value - expected) / max(1.0, expected)
        report.record_residual("fibonacci", err)
        if err > settings.tol:
            report.violation(f"k={k}: (P S^k)_11 = {value:.12g}, expected {expected}")
        matches = approx_eq(moment(example.F, k), example.T.power(k), settings.tol)
        if matches:
            matched.append(k)
        rows.append({"k": k, "value": value, "fibonacci": expected, "matches_T": matches})

    if tuple(matched) != EXPECTED_MATCHES:
        report.violation(f"moments match T^k for k in {matched}, expected {list(EXPECTED_MATCHES)}")
    spectral = is_spectral(example.F, settings.tol)
    if spectral:
        report.violation("golden-ratio measure reported spectral")

    report.results = {
        "rows": rows,
        "matched_k": matched,
        "spectral": spectral,
        "variance": variance(example.F).to_dict(),
        "povm": example.F.to_dict(),
    }
    if out_path is not None:
        atomic_write_json(out_path, example.F.to_dict())
        report.results["out"] = str(out_path)

    if not settings.json_output:
        table = Table(title="Golden-ratio example, T = 1")
        table.add_column("k", justify="right", style="cyan")
        table.add_column("(P S^k)_11", justify="right")
        table.add_column("f_(k-1)", justify="right")
        table.add_column("moment = T^k", justify="center")
        for row in rows:
            mark = "[green]yes[/green]" if row["matches_T"] else "[dim]no[/dim]"
            table.add_row(str(row["k"]), f"{row['value']:.10g}", str(row["fibonacci"]), mark)
        console.print(table)
        support = ", ".join(f"{x:.12g}" for x in example.F.support)
        console.print(f"support: {support}   spectral: {spectral}")
        if out_path is not None:
            console.print(f"[green]✓[/green] POVM written to {out_path}")
    finish(ctx, report, console)
