"""
Logging helpers for the tracker CLI.

Library modules only ever call ``logging.getLogger(__name__)``; the CLI entry
point is the single place that installs a handler.
"""

from __future__ import annotations

import logging
import os
import sys
from typing import Optional

DEFAULT_FORMAT = "[%(asctime)s] %(levelname)-8s %(name)s: %(message)s"
ENV_LEVEL_VAR = "SRDCF_LOG"

_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def resolve_level(value: Optional[str] = None) -> int:
    """
    Map an ``SRDCF_LOG`` style name to a logging level (default INFO).
    """

    raw = value if value is not None else os.environ.get(ENV_LEVEL_VAR, "")
    name = str(raw or "").strip().lower()
    if not name:
        return logging.INFO
    level = _LEVELS.get(name)
    if level is None:
        logging.getLogger(__name__).warning(
            "Unknown %s value %r; using info.", ENV_LEVEL_VAR, raw
        )
        return logging.INFO
    return level


def configure_logging(level: Optional[int] = None, format: Optional[str] = None) -> None:
    """
    Ensure the root logger is configured exactly once.
    """

    if logging.getLogger().handlers:
        # Respect any user provided configuration.
        return

    logging.basicConfig(
        level=resolve_level() if level is None else level,
        format=format or DEFAULT_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
    )
