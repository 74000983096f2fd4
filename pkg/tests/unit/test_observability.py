"""Smoke tests for the logging and Sentry wireup.

These tests verify that:

* ``init_logger`` returns without raising when ``SENTRY_DSN`` is unset.
* With JSON logs enabled, a log line carries the contract tags ``repo`` /
  ``tool`` / ``step`` / ``run_id``.
* Repeated calls replace the handler instead of stacking a second one.
* Each script entrypoint compiles.
"""

from __future__ import annotations

import json
import logging
import subprocess
import sys
from pathlib import Path

import pytest

from lib.observability import PLAIN_FORMAT, init_logger

REPO_ROOT = Path(__file__).resolve().parents[2]
SCRIPTS_DIR = REPO_ROOT / "scripts"


def _own_handlers() -> list[logging.Handler]:
    return [h for h in logging.getLogger().handlers if getattr(h, "_alpha_compound_handler", False)]


def test_init_logger_does_not_raise(monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    guard = init_logger(repo="alpha-compound", tool="alpha-compound test")
    assert guard.sentry_enabled is False
    assert guard.run_id


def test_init_logger_emits_json_with_contract_tags(capfd, monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    guard = init_logger(repo="alpha-compound", tool="alpha-compound test", json_logs=True)
    assert guard.json_logs

    log = logging.getLogger("alpha-compound.smoke")
    log.info("hello", extra={"step": "smoke"})

    captured = capfd.readouterr()
    assert captured.err, "expected JSON log line on stderr"
    payload = json.loads(captured.err.strip().splitlines()[-1])

    assert payload["repo"] == "alpha-compound"
    assert payload["tool"] == "alpha-compound test"
    assert payload["step"] == "smoke"
    assert payload["run_id"] == guard.run_id
    assert payload["message"] == "hello"
    assert payload["level"] == "INFO"


def test_json_logs_from_environment(monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    monkeypatch.setenv("ALPHA_COMPOUND_JSON_LOGS", "1")
    assert init_logger(repo="alpha-compound", tool="t").json_logs


def test_plain_format_by_default(monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    monkeypatch.delenv("ALPHA_COMPOUND_JSON_LOGS", raising=False)
    guard = init_logger(repo="alpha-compound", tool="t")
    assert not guard.json_logs
    (handler,) = _own_handlers()
    assert handler.formatter._fmt == PLAIN_FORMAT


def test_repeated_calls_replace_handler(monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    init_logger(repo="alpha-compound", tool="t", run_id="first")
    guard = init_logger(repo="alpha-compound", tool="t", run_id="second", json_logs=True)
    assert len(_own_handlers()) == 1
    assert guard.run_id == "second"


def test_exception_is_serialised(capfd, monkeypatch, reset_root_logger):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    init_logger(repo="alpha-compound", tool="t", json_logs=True)
    try:
        raise RuntimeError("boom")
    except RuntimeError:
        logging.getLogger("alpha-compound.smoke").exception("failed")
    payload = json.loads(capfd.readouterr().err.strip().splitlines()[-1])
    assert "RuntimeError: boom" in payload["exc_info"]


@pytest.mark.parametrize("script", ["alpha_cli.py", "run_examples.py"])
def test_script_compiles(script):
    """Each entrypoint must compile (i.e. its imports resolve)."""
    path = SCRIPTS_DIR / script
    assert path.exists(), f"missing script: {path}"

    result = subprocess.run(
        [
            sys.executable,
            "-c",
            (
                "import compileall, sys; "
                f"sys.exit(0 if compileall.compile_file('{path}', quiet=1) else 1)"
            ),
        ],
        capture_output=True,
        text=True,
        cwd=REPO_ROOT,
    )
    assert result.returncode == 0, (
        f"{script} failed to compile:\nstdout={result.stdout}\nstderr={result.stderr}"
    )
