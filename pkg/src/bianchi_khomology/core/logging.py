"""Loguru configuration shared by the CLI and the test suite."""

import sys

from loguru import logger

from .config import settings


def setup_logging(level: str | None = None) -> None:
    """Configure loguru for structured logging on stderr.

    stdout is reserved for reports, so the single sink writes to stderr.

    Args:
        level: Override for settings.LOG_LEVEL (used by the --verbose flag)
    """
    active_level = (level or settings.LOG_LEVEL).upper()

    # Remove default handler
    logger.remove()

    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level> | {extra}",
        level=active_level,
        serialize=False,
        colorize=False,
        backtrace=True,
        diagnose=False,
    )

    logger.debug("Logging configured", level=active_level)
