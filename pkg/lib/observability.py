"""Logging and Sentry bootstrap for the script entrypoints.

Every entrypoint calls :func:`init_logger` unconditionally before doing any
work. Two log shapes are supported:

* the plain ``"%(asctime)s - %(levelname)s - %(message)s"`` stderr format
  (default, readable in a terminal);
* one JSON object per line carrying the contract tags ``repo`` / ``tool`` /
  ``run_id`` / ``step`` (opt in with ``json_logs=True`` or
  ``ALPHA_COMPOUND_JSON_LOGS=1``), for machine collection.

Sentry is initialised only when a DSN is supplied or ``SENTRY_DSN`` is set.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

PLAIN_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

_INITIALIZED = False


@dataclass(frozen=True)
class LoggerGuard:
    """What :func:`init_logger` set up.

    Attributes:
        sentry_enabled: True when ``sentry_sdk.init`` was called.
        run_id: Identifier stamped on every JSON log line of this process.
        json_logs: True when the JSON formatter is installed.
    """

    sentry_enabled: bool
    run_id: str
    json_logs: bool


class JsonLogFormatter(logging.Formatter):
    """Render a record as a single JSON line with the contract tags."""

    def __init__(self, repo: str, tool: str, run_id: str) -> None:
        super().__init__()
        self.repo = repo
        self.tool = tool
        self.run_id = run_id

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "time": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "repo": self.repo,
            "tool": self.tool,
            "run_id": self.run_id,
            "step": getattr(record, "step", None),
        }
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, sort_keys=True)


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


def _init_sentry(dsn: str, repo: str, tool: str, run_id: str) -> bool:
    try:
        import sentry_sdk
        from sentry_sdk.integrations.logging import LoggingIntegration
    except ImportError:
        logging.getLogger(__name__).warning("sentry_sdk not installed; Sentry disabled")
        return False

    sentry_sdk.init(
        dsn=dsn,
        integrations=[LoggingIntegration(level=logging.INFO, event_level=logging.ERROR)],
    )
    sentry_sdk.set_tag("repo", repo)
    sentry_sdk.set_tag("tool", tool)
    sentry_sdk.set_tag("run_id", run_id)
    return True


def init_logger(
    repo: str,
    tool: str,
    sentry_dsn: str | None = None,
    run_id: str | None = None,
    json_logs: bool | None = None,
) -> LoggerGuard:
    """Install the stderr handler and, when configured, Sentry.

    Repeated calls replace the handler installed by a previous call, so
    tests can switch formats; Sentry is initialised at most once.
    """
    global _INITIALIZED

    run_id = run_id or uuid.uuid4().hex
    if json_logs is None:
        json_logs = _env_flag("ALPHA_COMPOUND_JSON_LOGS")

    handler = logging.StreamHandler(sys.stderr)
    if json_logs:
        handler.setFormatter(JsonLogFormatter(repo=repo, tool=tool, run_id=run_id))
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_alpha_compound_handler", False):
            root.removeHandler(existing)
    handler._alpha_compound_handler = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(logging.INFO)

    sentry_enabled = False
    dsn = sentry_dsn or os.environ.get("SENTRY_DSN")
    if dsn and not _INITIALIZED:
        sentry_enabled = _init_sentry(dsn, repo, tool, run_id)
    _INITIALIZED = True

    return LoggerGuard(sentry_enabled=sentry_enabled, run_id=run_id, json_logs=json_logs)


__all__ = ["JsonLogFormatter", "LoggerGuard", "init_logger"]
