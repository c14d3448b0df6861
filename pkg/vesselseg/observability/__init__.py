"""Structured logging and error reporting helpers."""

from .errors import init_error_reporting
from .logging import RUN_LOGGER_NAME, STDERR_HANDLER_NAME, RunLogger, configure_logging, log_event

__all__ = ["RUN_LOGGER_NAME", "STDERR_HANDLER_NAME", "RunLogger", "configure_logging", "init_error_reporting", "log_event"]
