"""Logging utilities for the simulator."""

import logging
import sys
from typing import Dict

import colorlog

_LOGGERS: Dict[str, logging.Logger] = {}
_DEFAULT_LEVEL = "INFO"


def setup_logger(name: str, log_level: str = "") -> logging.Logger:
    """
    Set up a colorized logger for console output.

    Args:
        name: Logger name (usually __name__)
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
            Empty means the process-wide level last set by set_log_level.

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    _LOGGERS[name] = logger

    # Avoid adding handlers multiple times
    if logger.handlers:
        return logger

    level = getattr(logging, (log_level or _DEFAULT_LEVEL).upper())
    logger.setLevel(level)
    logger.propagate = False

    handler = colorlog.StreamHandler(sys.stdout)
    handler.setLevel(logging.DEBUG)

    formatter = colorlog.ColoredFormatter(
        "%(log_color)s%(levelname)-8s%(reset)s %(blue)s%(name)s%(reset)s: %(message)s",
        datefmt=None,
        reset=True,
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "red,bg_white",
        },
        secondary_log_colors={},
        style="%",
    )

    handler.setFormatter(formatter)
    logger.addHandler(handler)

    return logger


def set_log_level(log_level: str) -> None:
    """
    Change the level of every logger created through setup_logger.

    Args:
        log_level: Logging level name
    """
    global _DEFAULT_LEVEL
    _DEFAULT_LEVEL = log_level.upper()
    level = getattr(logging, _DEFAULT_LEVEL)
    for logger in _LOGGERS.values():
        logger.setLevel(level)
