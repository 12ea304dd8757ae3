from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from ovm_cli.main import cli
from ovm_cli.povm import FiniteOVM, is_spectral


def test_even_odd_counterexample_written_to_file(tmp_path) -> None:
    out = tmp_path / "c23.json"

    result = CliRunner().invoke(cli, ["counterexample", "--p", "2", "--q", "3", "--out", str(out)])

    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert set(doc) == {"params", "povm", "s_matrix", "transcript", "verdict"}
    assert doc["params"]["alpha"] == pytest.approx(5 / 32, abs=1e-12)
    assert not is_spectral(FiniteOVM.from_dict(doc["povm"]))
    assert "Counterexample written" in result.output


def test_json_report_carries_verdict() -> None:
    result = CliRunner().invoke(
        cli, ["--json", "counterexample", "--p", "1", "--q", "3", "--tau", "-2", "--dim", "2"]
    )

    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    verdict = report["results"]["verdict"]
    assert verdict["moments_match"] == [True, True]
    assert verdict["direct_spectral"] is False
    assert report["results"]["povm"]["dim"] == 2
    assert report["residual_summary"]["system_q"] < 1e-9


def test_pair_in_omega_is_refused() -> None:
    result = CliRunner().invoke(cli, ["--json", "counterexample", "--p", "1", "--q", "2"])

    assert result.exit_code == 2
    report = json.loads(result.stdout)
    assert report["exit_status"] == "input_error"
    assert "spectral measure" in report["errors"][0]


def test_decreasing_exponents_are_an_input_error() -> None:
    result = CliRunner().invoke(cli, ["counterexample", "--p", "3", "--q", "2"])

    assert result.exit_code == 2


def test_zero_exponent_is_a_usage_error() -> None:
    result = CliRunner().invoke(cli, ["counterexample", "--p", "0", "--q", "2"])

    assert result.exit_code == 2
