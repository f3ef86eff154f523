"""Logging utilities for Coalesce."""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager

from rich.logging import RichHandler

NOISY_LOGGERS = ["matplotlib", "PIL", "numexpr"]


def setup_logging(debug: bool = False) -> None:
    """Configure the root logger with a single Rich handler.

    numpy and scipy report numerical trouble through ``warnings``; those are
    routed into the log so they share the console format.

    Args:
        debug: Enable debug level logging and locals in tracebacks
    """
    level = logging.DEBUG if debug else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[
            RichHandler(
                rich_tracebacks=True,
                tracebacks_show_locals=debug,
                show_path=debug,
            )
        ],
        force=True,
    )
    logging.captureWarnings(True)

    for logger_name in NOISY_LOGGERS:
        logging.getLogger(logger_name).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance.

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


@contextmanager
def log_duration(logger: logging.Logger, task: str) -> Iterator[None]:
    """Log how long the wrapped block took, at DEBUG."""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.debug(f"{task} took {time.perf_counter() - start:.3f} s")
