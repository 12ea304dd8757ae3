"""Smoke runs of the ``ovm verify`` suites on small seeded corpora."""

from __future__ import annotations

import pytest
from rich.console import Console

from ovm_cli import suites
from ovm_cli.suites import (
    SUITE_NAMES,
    SuiteConfig,
    SuiteResult,
    render_report_card,
    render_results_table,
    run_suites,
)

SMALL = SuiteConfig(trials=6, seed=3, dim_max=3)


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_each_suite_passes_on_a_small_corpus(name: str) -> None:
    (result,) = run_suites(name, SMALL)

    assert result.key == name
    assert result.instances > 0
    assert result.passed, result.failures


def test_theorem_suite_passes_at_full_trial_count() -> None:
    (result,) = run_suites("theorem", SuiteConfig(trials=500, seed=42, dim_max=4))

    assert result.passed, result.failures


def test_all_runs_every_suite_in_order() -> None:
    results = run_suites("all", SuiteConfig(trials=2, seed=1, dim_max=2))

    assert [r.key for r in results] == SUITE_NAMES


def test_results_do_not_depend_on_worker_count() -> None:
    serial = run_suites("kadison", SuiteConfig(trials=8, seed=9, workers=1))[0]
    threaded = run_suites("kadison", SuiteConfig(trials=8, seed=9, workers=4))[0]

    assert serial.to_dict() == threaded.to_dict()


def test_suite_result_keeps_a_bounded_number_of_dumps() -> None:
    result = SuiteResult("x", "X")
    for i in range(suites.MAX_DUMPS + 2):
        result.fail(f"failure {i}", {"i": i})
    result.residual(0.5)
    result.residual(0.25)

    assert not result.passed
    assert len(result.failures) == suites.MAX_DUMPS + 2
    assert len(result.dumps) == suites.MAX_DUMPS
    assert result.to_dict()["max_residual"] == 0.5


def test_report_card_lists_failures() -> None:
    console = Console(record=True, width=120)
    failing = SuiteResult("hankel", "Hankel / variance", instances=3)
    failing.fail("trial 1: Hankel matrix not PSD")
    passing = SuiteResult("kadison", "Kadison gap", instances=3)

    render_results_table(console, [passing, failing])
    render_report_card(console, [passing, failing])

    text = console.export_text()
    assert "FAIL" in text
    assert "hankel: trial 1: Hankel matrix not PSD" in text


def test_report_card_pass() -> None:
    console = Console(record=True, width=120)

    render_report_card(console, [SuiteResult("kadison", "Kadison gap", instances=1)])

    assert "PASS (1/1 suites)" in console.export_text()
