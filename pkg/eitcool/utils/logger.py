"""Structured logging setup"""

import logging
import sys
from typing import Optional

import structlog

from eitcool.config import settings


def _stderr_logger(*args) -> structlog.PrintLogger:
    """PrintLogger bound to whatever sys.stderr is at creation time"""
    return structlog.PrintLogger(file=sys.stderr)


def setup_logging(level: Optional[str] = None):
    """Configure structured logging on stderr (stdout and data files stay clean)"""

    level_name = (level or settings.log_level).upper()
    numeric_level = getattr(logging, level_name, logging.INFO)

    # Configure standard logging first
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=numeric_level
    )

    # Configure structlog processors
    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
    ]

    if settings.log_format == "json":
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def get_logger(name: str = None):
    """Get a logger instance"""
    return structlog.get_logger(name)
