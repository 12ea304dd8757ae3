"""``ovm counterexample`` - two matching moments without spectrality."""

from __future__ import annotations

from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from ..characterization import certify_two_moment
from ..counterexample import build_dilation_matrix, build_povm, solve_params, transcript
from ..errors import ConvergenceError, OVMError
from ..io_utils import atomic_write_json
from ..report import RunReport, current_settings, finish, format_matrix

console = Console()


@click.command()
@click.option("--p", "p", type=click.IntRange(min=1), required=True, help="Lower exponent.")
@click.option(
    "--q", "q", type=click.IntRange(min=1), required=True, help="Upper exponent (p <= q)."
)
@click.option("--tau", type=float, default=1.0, show_default=True, help="T = tau * I.")
@click.option("--dim", type=click.IntRange(min=1), default=1, show_default=True)
@click.option(
    "--lambda1",
    type=float,
    default=2.0,
    show_default=True,
    help="Free support point for the odd cases (must exceed 1).",
)
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write params, POVM, S-matrix and transcript to this JSON file.",
)
@click.pass_context
def counterexample(
    ctx: click.Context,
    p: int,
    q: int,
    tau: float,
    dim: int,
    lambda1: float,
    out_path: Path | None,
) -> None:
    """Synthesize a non-spectral F with T^p, T^q equal to its p-th and q-th moments.

    Only exponent pairs outside Omega admit such an F; for p odd < q even
    the command refuses (exit 2).

    \b
        ovm counterexample --p 2 --q 3 --out c23.json
    """
    settings = current_settings(ctx)
    report = RunReport(command="counterexample")
    report.inputs = {"p": str(p), "q": str(q), "tau": repr(tau), "dim": str(dim)}
    try:
        params = solve_params(p, q, tau, lambda1=lambda1)
    except ConvergenceError as exc:
        report.violation(f"solver failure: {exc}")
        finish(ctx, report, console)
        return
    except OVMError as exc:
        report.input_error(exc)
        finish(ctx, report, console)
        return

    t, f = build_povm(params, dim)
    s = build_dilation_matrix(params)
    record = transcript(params)
    verdict = certify_two_moment(t, f, p, q, settings.tol)

    report.record_residual("system_p", record["system_residuals"]["p"])
    report.record_residual("system_q", record["system_residuals"]["q"])
    if not verdict.all_match:
        report.violation(f"moments do not match T^p, T^q (residuals {verdict.residuals})")
    if verdict.direct_spectral:
        report.violation("constructed measure is spectral")

    document = {
        "params": params.to_dict(),
        "povm": f.to_dict(),
        "s_matrix": s.to_dict(),
        "transcript": record,
        "verdict": verdict.to_dict(),
    }
    report.results = dict(document)
    if out_path is not None:
        atomic_write_json(out_path, report.to_dict()["results"])
        report.results["out"] = str(out_path)

    if not settings.json_output:
        table = Table(title=f"Counterexample for (p, q) = ({p}, {q}), tau = {tau:g}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        for name in ("alpha", "beta", "lambda1", "lambda2"):
            table.add_row(name, f"{getattr(params, name):.15g}")
        table.add_row("residual (p)", f"{record['system_residuals']['p']:.2e}")
        table.add_row("residual (q)", f"{record['system_residuals']['q']:.2e}")
        table.add_row("determinant", f"{record['determinant']:.2e}")
        table.add_row("Phi(uv) - Phi(u)Phi(v)", f"{record['multiplicativity_defect']:.6g}")
        console.print(table)
        console.print(f"S =\n{format_matrix(s, 12)}")
        if out_path is not None:
            console.print(f"[green]✓[/green] Counterexample written to {out_path}")
    finish(ctx, report, console)
