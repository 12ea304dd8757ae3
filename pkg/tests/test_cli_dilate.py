from __future__ import annotations

import json

from click.testing import CliRunner

from ovm_cli.counterexample import fibonacci_example
from ovm_cli.dilation import NaimarkDilation
from ovm_cli.hermitian import HermitianMatrix
from ovm_cli.main import cli
from ovm_cli.povm import spectral_measure_of


def test_golden_ratio_dilation_is_two_dimensional(tmp_path) -> None:
    src = tmp_path / "fib.json"
    src.write_text(json.dumps(fibonacci_example().F.to_dict()))
    out = tmp_path / "out" / "fib-dilation.json"

    result = CliRunner().invoke(cli, ["--json", "dilate", str(src), "--out", str(out)])

    assert result.exit_code == 0, result.output
    results = json.loads(result.stdout)["results"]
    assert results["small_dim"] == 1
    assert results["big_dim"] == 2
    assert results["commutes"] is False
    assert max(results["moment_residuals"]) < 1e-10
    assert NaimarkDilation.from_dict(json.loads(out.read_text())).big_dim == 2


def test_spectral_measure_commutes(tmp_path) -> None:
    src = tmp_path / "spectral.json"
    f = spectral_measure_of(HermitianMatrix.diag([-1.0, 0.5, 3.0]))
    src.write_text(json.dumps(f.to_dict()))

    result = CliRunner().invoke(cli, ["dilate", str(src)])

    assert result.exit_code == 0, result.output
    assert "dim K = 3" in result.output
    assert "true" in result.output


def test_missing_file_is_a_usage_error(tmp_path) -> None:
    result = CliRunner().invoke(cli, ["dilate", str(tmp_path / "missing.json")])

    assert result.exit_code == 2
