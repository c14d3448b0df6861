from __future__ import annotations

import json
import logging
import sys
import time
import uuid
from types import TracebackType

RUN_LOGGER_NAME = "vesselseg.run"
STDERR_HANDLER_NAME = "vesselseg.stderr"


def configure_logging(level: str | int = logging.WARNING) -> None:
    """Send log records to the current ``sys.stderr``; stdout carries JSON reports only."""
    root = logging.getLogger()
    for existing in list(root.handlers):
        if existing.get_name() == STDERR_HANDLER_NAME:
            root.removeHandler(existing)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(STDERR_HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s %(message)s"))
    root.addHandler(handler)
    root.setLevel(level if isinstance(level, int) else level.upper())


def log_event(logger: logging.Logger, payload: dict[str, object], level: int = logging.INFO) -> None:
    if logger.isEnabledFor(level):
        logger.log(level, json.dumps(payload, separators=(",", ":"), default=str))


class RunLogger:
    """Emit one structured log line per segmentation run, with duration and outcome."""

    def __init__(self, context: dict[str, object] | None = None, logger: logging.Logger | None = None) -> None:
        self.logger = logger if logger is not None else logging.getLogger(RUN_LOGGER_NAME)
        self.context = dict(context or {})
        self.run_id = str(uuid.uuid4())
        self._start = 0.0

    def __enter__(self) -> "RunLogger":
        self._start = time.perf_counter()
        return self

    def update(self, **fields: object) -> None:
        self.context.update(fields)

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        duration_ms = int((time.perf_counter() - self._start) * 1000)
        payload: dict[str, object] = {
            "event": "segmentation_run" if exc is None else "segmentation_run_error",
            "run_id": self.run_id,
            "duration_ms": duration_ms,
        }
        payload.update(self.context)
        if exc is not None:
            payload["error"] = repr(exc)
            log_event(self.logger, payload, level=logging.ERROR)
        else:
            log_event(self.logger, payload)
