from __future__ import annotations

import logging

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration

logger = logging.getLogger(__name__)


def init_error_reporting(dsn: str | None, environment: str, traces_sample_rate: float = 0.0) -> bool:
    """Start Sentry when ``dsn`` is an http(s) URL; ERROR records such as failed runs become events.

    Returns whether reporting was enabled.
    """
    if not dsn or not dsn.strip().lower().startswith(("http://", "https://")):
        return False
    sentry_sdk.init(
        dsn=dsn.strip(),
        environment=environment,
        integrations=[LoggingIntegration(level=logging.INFO, event_level=logging.ERROR)],
        traces_sample_rate=traces_sample_rate,
    )
    logger.debug("Sentry error reporting enabled for environment %s", environment)
    return True
