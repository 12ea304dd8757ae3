from __future__ import annotations

from click.testing import CliRunner

from ovm_cli import __version__
from ovm_cli.main import cli


def test_help_lists_every_command() -> None:
    result = CliRunner().invoke(cli, ["--help"])

    assert result.exit_code == 0
    for name in ("check", "counterexample", "dilate", "fibonacci", "verify"):
        assert name in result.output


def test_version_flag() -> None:
    result = CliRunner().invoke(cli, ["--version"])

    assert result.exit_code == 0
    assert __version__ in result.output


def test_non_positive_tolerance_is_rejected() -> None:
    result = CliRunner().invoke(cli, ["--tol", "-1", "fibonacci"])

    assert result.exit_code == 2
    assert "--tol" in result.output


def test_bare_invocation_prints_hint() -> None:
    result = CliRunner().invoke(cli, [])

    assert result.exit_code == 0
    assert "ovm --help" in result.output


def test_unknown_command() -> None:
    result = CliRunner().invoke(cli, ["prove"])

    assert result.exit_code == 2
