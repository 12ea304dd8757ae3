"""``ovm check`` - moments, variance, spectrality and Hankel positivity of a POVM file."""

from __future__ import annotations

from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from ..config import ZERO_VARIANCE
from ..errors import OVMError
from ..hermitian import is_psd
from ..io_utils import read_json
from ..povm import FiniteOVM, hankel, is_spectral, moment, standardize, variance
from ..report import RunReport, current_settings, finish, format_matrix

console = Console()


@click.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--moments",
    "max_moment",
    type=click.IntRange(min=0),
    default=6,
    show_default=True,
    help="Print moments 0..K.",
)
@click.option(
    "--hankel",
    "max_hankel",
    type=click.IntRange(min=0),
    default=3,
    show_default=True,
    help="Check Hankel positivity for n = 0..N.",
)
@click.pass_context
def check(ctx: click.Context, file: Path, max_moment: int, max_hankel: int) -> None:
    """Inspect a POVM document.

    Prints the moments, the intrinsic noise Var(F) = m2 - m1^2, whether the
    measure is spectral and whether the block Hankel matrices of moments are
    positive semidefinite.  Var(F) and the Hankel matrices must be PSD, and
    Var(F) vanishes exactly for spectral measures; any disagreement is a
    violation (exit 1).

    \b
        ovm check fib.json --moments 8 --hankel 4
    """
    settings = current_settings(ctx)
    report = RunReport(command="check")
    try:
        f = FiniteOVM.from_dict(read_json(file))
        report.inputs[file.name] = f.digest()
        f.require_normalized()
    except OVMError as exc:
        report.input_error(exc)
        finish(ctx, report, console)
        return

    tol = settings.tol
    moments = [moment(f, k) for k in range(max_moment + 1)]
    var = variance(f)
    spectral = is_spectral(f, tol)
    var_norm = var.norm_fro()
    unit_var_norm = variance(standardize(f)).norm_fro()

    hankel_rows = []
    for n in range(max_hankel + 1):
        h = hankel(f, n)
        min_eig = h.min_eigenvalue()
        psd = is_psd(h, tol)
        hankel_rows.append({"n": n, "min_eigenvalue": min_eig, "psd": psd})
        report.record_residual("hankel_psd", max(0.0, -min_eig))
        if not psd:
            report.violation(f"Hankel matrix n={n} has eigenvalue {min_eig:.3g}")

    report.record_residual("variance_psd", max(0.0, -var.min_eigenvalue()))
    if not is_psd(var, tol):
        report.violation(f"Var(F) has eigenvalue {var.min_eigenvalue():.3g}")
    if spectral != (unit_var_norm <= ZERO_VARIANCE):
        report.violation(
            f"spectral={spectral} but ||Var(F)||_F = {var_norm:.3g} "
            f"({unit_var_norm:.3g} on the standardized support)"
        )

    report.results = {
        "dim": f.dim,
        "atoms": len(f),
        "support": list(f.support),
        "moments": [m.to_dict() for m in moments],
        "variance": var.to_dict(),
        "variance_norm": var_norm,
        "variance_norm_standardized": unit_var_norm,
        "spectral": spectral,
        "hankel": hankel_rows,
    }

    if not settings.json_output:
        console.print(
            f"[bold]{file.name}[/bold]  dim={f.dim}  atoms={len(f)}  "
            f"support={', '.join(f'{x:.6g}' for x in f.support)}"
        )
        table = Table(show_lines=False)
        table.add_column("k", justify="right", style="cyan")
        table.add_column("moment_k")
        for k, m in enumerate(moments):
            table.add_row(str(k), format_matrix(m))
        console.print(table)
        console.print(f"Var(F) = {format_matrix(var)}  (||.||_F = {var_norm:.3g})")
        flag = "[green]true[/green]" if spectral else "[yellow]false[/yellow]"
        console.print(f"spectral: {flag}")
        for row in hankel_rows:
            status = "[green]PSD[/green]" if row["psd"] else "[red]not PSD[/red]"
            low = row["min_eigenvalue"]
            console.print(f"Hankel n={row['n']}: {status}  (min eigenvalue {low:.3g})")
    finish(ctx, report, console)
