"""``ovm dilate`` - minimal Naimark dilation of a POVM file."""

from __future__ import annotations

from pathlib import Path

import click
from rich.console import Console

from ..dilation import (
    commutator_defects,
    compress,
    dilate_minimal,
    effect_rank,
    invariant_defects,
    moment_via_dilation,
    p_commutes,
)
from ..errors import OVMError
from ..hermitian import approx_eq, relative_residual
from ..io_utils import atomic_write_json, read_json
from ..povm import FiniteOVM, moment
from ..report import RunReport, current_settings, finish

console = Console()

MOMENT_CHECKS = 6


@click.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the dilation JSON to this file.",
)
@click.pass_context
def dilate(ctx: click.Context, file: Path, out_path: Path | None) -> None:
    """Build the minimal Naimark dilation of a POVM document.

    Reports the dimension of the enlarged space, whether the projection onto
    the original space commutes with the spectral measure (true exactly for
    spectral input), and the residuals of V* S^k V against the direct
    moments for k <= 6.
    """
    settings = current_settings(ctx)
    report = RunReport(command="dilate")
    try:
        f = FiniteOVM.from_dict(read_json(file))
        report.inputs[file.name] = f.digest()
        d = dilate_minimal(f)
    except OVMError as exc:
        report.input_error(exc)
        finish(ctx, report, console)
        return

    ranks = [effect_rank(e) for e in f.effects]
    commutes = p_commutes(d, settings.tol)
    defects = invariant_defects(d)
    for name, value in defects.items():
        report.record_residual(name, value)
        if value > settings.tol * (1.0 + d.big_dim):
            report.violation(f"dilation {name} defect {value:.3g}")

    moment_residuals = []
    for k in range(MOMENT_CHECKS + 1):
        direct, via = moment(f, k), moment_via_dilation(d, k)
        res = relative_residual(direct, via)
        moment_residuals.append(res)
        report.record_residual("moment_compression", res)
        if not approx_eq(direct, via, settings.tol):
            report.violation(f"compressed moment {k} differs by {res:.3g}")

    back = compress(d)
    roundtrip = max(relative_residual(x, y) for x, y in zip(back.effects, f.effects))
    report.record_residual("roundtrip", roundtrip)
    if len(back) != len(f) or roundtrip > settings.tol:
        report.violation(f"compress(dilate(F)) differs from F ({roundtrip:.3g})")

    report.results = {
        "small_dim": d.small_dim,
        "big_dim": d.big_dim,
        "ranks": ranks,
        "commutes": commutes,
        "commutator_defects": commutator_defects(d),
        "moment_residuals": moment_residuals,
    }

    if out_path is not None:
        atomic_write_json(out_path, d.to_dict())
        report.results["out"] = str(out_path)

    if not settings.json_output:
        console.print(
            f"[bold]{file.name}[/bold]  dim H = {d.small_dim}  dim K = {d.big_dim}  "
            f"(ranks {ranks})"
        )
        state = "[green]true[/green]" if commutes else "[yellow]false[/yellow]"
        console.print(f"P commutes with the spectral measure: {state}")
        console.print(f"max moment residual (k <= {MOMENT_CHECKS}): {max(moment_residuals):.3g}")
        if out_path is not None:
            console.print(f"[green]✓[/green] Dilation written to {out_path}")
    finish(ctx, report, console)
