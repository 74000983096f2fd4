"""Unit tests for scripts/run_examples.py: step runner and arg parsing."""

from __future__ import annotations

import argparse
import logging

import pytest

FAST_STEPS = [
    "diag_alpha_compounds",
    "time_varying_counterexample",
    "rotation_decay_measure",
    "thomas_certificate",
    "laplacian_abscissa",
    "linear_map_dimension",
]


class TestParseArgs:
    def test_defaults(self, run_examples) -> None:
        args = run_examples.parse_args([])
        assert args.steps == run_examples.STEP_NAMES
        assert args.horizon == run_examples.DEFAULT_HORIZON

    def test_full_horizon(self, run_examples) -> None:
        assert run_examples.parse_args(["--full"]).horizon == run_examples.FULL_HORIZON

    def test_horizon_and_full_are_exclusive(self, run_examples) -> None:
        with pytest.raises(SystemExit):
            run_examples.parse_args(["--full", "--horizon", "10"])

    def test_step_subset(self, run_examples) -> None:
        args = run_examples.parse_args(["--steps", "thomas_certificate, laplacian_abscissa"])
        assert args.steps == ["thomas_certificate", "laplacian_abscissa"]

    def test_unknown_step(self, run_examples) -> None:
        with pytest.raises(SystemExit) as excinfo:
            run_examples.parse_args(["--steps", "thomas_certificate,nope"])
        assert excinfo.value.code == 2

    def test_every_step_is_registered(self, run_examples) -> None:
        assert list(run_examples.STEPS) == run_examples.STEP_NAMES


class TestRunStep:
    def test_exception_becomes_failure(self, run_examples, monkeypatch, caplog) -> None:
        def explode(result, args):
            raise RuntimeError("boom")

        monkeypatch.setitem(run_examples.STEPS, "diag_alpha_compounds", explode)
        with caplog.at_level(logging.ERROR, logger=run_examples.logger.name):
            result = run_examples.run_step("diag_alpha_compounds", argparse.Namespace())
        assert not result.passed
        assert result.failures == ["RuntimeError: boom"]
        assert any("raised" in r.message for r in caplog.records)

    def test_failed_check_is_recorded(self, run_examples, monkeypatch) -> None:
        def half_wrong(result, args):
            result.check(True, "fine")
            result.check(False, "wrong value")

        monkeypatch.setitem(run_examples.STEPS, "rotation_decay_measure", half_wrong)
        result = run_examples.run_step("rotation_decay_measure", argparse.Namespace())
        assert result.failures == ["wrong value"]

    def test_step_name_is_tagged(self, run_examples, caplog) -> None:
        with caplog.at_level(logging.INFO, logger=run_examples.logger.name):
            run_examples.run_step("linear_map_dimension", argparse.Namespace())
        assert any(getattr(r, "step", None) == "linear_map_dimension" for r in caplog.records)

    @pytest.mark.parametrize("name", FAST_STEPS)
    def test_fast_steps_pass(self, run_examples, name: str) -> None:
        result = run_examples.run_step(name, run_examples.parse_args([]))
        assert result.passed, result.failures
        assert result.elapsed >= 0


class TestMain:
    def test_failure_sets_exit_code(self, run_examples, monkeypatch, reset_root_logger) -> None:
        monkeypatch.setitem(run_examples.STEPS, "linear_map_dimension", lambda result, args: result.check(False, "x"))
        assert run_examples.main(["--steps", "linear_map_dimension"]) == 1

    def test_success(self, run_examples, reset_root_logger) -> None:
        assert run_examples.main(["--steps", "rotation_decay_measure,linear_map_dimension"]) == 0
