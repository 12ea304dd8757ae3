"""Main entry point for the ovm CLI."""

from __future__ import annotations

import importlib
import logging
import sys
from typing import Any

import click
from rich.console import Console

from . import __version__
from .config import resolve_settings

console = Console()

# Maps CLI command names to their (module_path, attribute_name) for lazy loading.
_LAZY_COMMANDS: dict[str, tuple[str, str]] = {
    "check": (".commands.check", "check"),
    "counterexample": (".commands.counterexample", "counterexample"),
    "dilate": (".commands.dilate", "dilate"),
    "fibonacci": (".commands.fibonacci", "fibonacci"),
    "verify": (".commands.verify", "verify"),
}


class _LazyGroup(click.Group):
    """Click group that defers command module imports until invocation.

    ``--help`` still lists every command because the names are known
    statically from ``_LAZY_COMMANDS``; the numerical stack is imported only
    for the command that runs.
    """

    def __init__(
        self,
        *args: Any,
        lazy_commands: dict[str, tuple[str, str]] | None = None,
        **kwargs: Any,
    ):
        super().__init__(*args, **kwargs)
        self._lazy_commands = lazy_commands or {}

    def list_commands(self, ctx: click.Context) -> list[str]:
        base = super().list_commands(ctx)
        lazy = sorted(self._lazy_commands.keys())
        return sorted(set(base + lazy))

    def get_command(self, ctx: click.Context, cmd_name: str) -> click.Command | None:
        rv = super().get_command(ctx, cmd_name)
        if rv is not None:
            return rv
        if cmd_name not in self._lazy_commands:
            return None
        module_path, attr_name = self._lazy_commands[cmd_name]
        mod = importlib.import_module(module_path, package=__package__)
        cmd = getattr(mod, attr_name)
        self.add_command(cmd, cmd_name)
        return cmd


def _configure_logging(level_name: str) -> None:
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", level=level
    )
    logging.getLogger().setLevel(level)


@click.group(cls=_LazyGroup, lazy_commands=_LAZY_COMMANDS, invoke_without_command=True)
@click.version_option(version=__version__, prog_name="ovm")
@click.option(
    "--tol",
    type=float,
    default=None,
    help="Certification tolerance (relative Frobenius). Overrides OVM_TOL.",
)
@click.option(
    "--json",
    "json_output",
    is_flag=True,
    default=False,
    help="Print the machine-readable run report instead of tables.",
)
@click.option("-v", "--verbose", count=True, help="Increase log verbosity (-vv for debug).")
@click.pass_context
def cli(ctx: click.Context, tol: float | None, json_output: bool, verbose: int) -> None:
    """ovm - operator-valued measures with finite support.

    \b
    Commands:
      check           Moments, variance, spectrality and Hankel positivity of a POVM file
      dilate          Minimal Naimark dilation of a POVM file
      counterexample  Non-spectral measure matching two moments (pairs outside Omega)
      fibonacci       The golden-ratio example on S = [[0, 1], [1, 1]]
      verify          Seeded property suites

    \b
    Exit codes: 0 pass, 1 violation, 2 input error.
    """
    if tol is not None and tol <= 0:
        raise click.BadParameter("must be positive", param_hint="--tol")
    settings = resolve_settings(tol=tol, json_output=json_output, verbosity=verbose)
    _configure_logging(settings.log_level)
    ctx.obj = settings
    if ctx.invoked_subcommand is None:
        console.print("[dim]Type [bold]ovm --help[/bold] for available commands.[/dim]")


def main() -> None:
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
