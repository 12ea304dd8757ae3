"""Run reports shared by every ``ovm`` command.

A report is the machine-readable transcript of one invocation.  It carries
no timestamps or host data, so the same command and seed always serialize
to the same bytes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any

import click
import numpy as np
from rich.console import Console

from .config import Settings
from .errors import DocumentError
from .hermitian import HermitianMatrix


class ExitStatus(enum.IntEnum):
    PASS = 0
    VIOLATION = 1
    INPUT_ERROR = 2

    @property
    def label(self) -> str:
        return self.name.lower()


def jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return f if math.isfinite(f) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    residual_summary: dict[str, float] = field(default_factory=dict)
    exit_status: ExitStatus = ExitStatus.PASS
    errors: list[str] = field(default_factory=list)

    def record_residual(self, check: str, value: float) -> None:
        """Keep the maximum residual seen for ``check``."""
        previous = self.residual_summary.get(check)
        value = float(value)
        if previous is None or value > previous:
            self.residual_summary[check] = value

    def violation(self, message: str) -> None:
        self.errors.append(message)
        if self.exit_status is ExitStatus.PASS:
            self.exit_status = ExitStatus.VIOLATION

    def input_error(self, exc: Exception) -> None:
        if isinstance(exc, DocumentError):
            self.errors.extend(exc.errors)
        else:
            self.errors.append(str(exc))
        self.exit_status = ExitStatus.INPUT_ERROR

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "command": self.command,
            "inputs": dict(self.inputs),
            "results": self.results,
            "residual_summary": self.residual_summary,
            "exit_status": self.exit_status.label,
        }
        if self.errors:
            payload["errors"] = list(self.errors)
        return jsonable(payload)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def finish(ctx: click.Context, report: RunReport, console: Console) -> None:
    """Emit the JSON transcript when requested and exit with the report status."""
    if current_settings(ctx).json_output:
        click.echo(report.to_json())
    elif report.exit_status is ExitStatus.INPUT_ERROR:
        for line in report.errors:
            console.print(f"[red]✗[/red] {line}")
    elif report.exit_status is ExitStatus.VIOLATION:
        console.print(f"[red]✗[/red] {report.command}: {len(report.errors)} violation(s)")
        for line in report.errors:
            console.print(f"  [dim]{line}[/dim]")
    ctx.exit(int(report.exit_status))


def current_settings(ctx: click.Context) -> Settings:
    """Settings stored by the root group, or defaults when a command runs standalone."""
    obj = ctx.find_object(Settings)
    return obj if obj is not None else Settings()


def format_matrix(m: HermitianMatrix, digits: int = 6) -> str:
    """Compact text form: a plain number for 1x1, rows of entries otherwise."""
    data = m.data
    real_only = bool(np.all(np.abs(data.imag) <= 1e-12 * (1.0 + np.abs(data.real))))

    def cell(z: complex) -> str:
        if real_only:
            return f"{z.real:.{digits}g}"
        return f"{z.real:.{digits}g}{z.imag:+.{digits}g}j"

    if m.dim == 1:
        return cell(complex(data[0, 0]))
    return "\n".join("[" + ", ".join(cell(complex(z)) for z in row) + "]" for row in data)
