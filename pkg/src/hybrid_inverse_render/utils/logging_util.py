"""
Logging utility module for configuring and retrieving application loggers.

This module provides functionality to set up logging configuration
and retrieve named logger instances. It uses Python's built-in logging module,
configured once through a dictionary config with one logger per concern of the
pipeline (geometry, rendering, training, ...).
"""

import logging
import logging.config
from typing import Any, Dict

LOGNAME_APPEARANCE = "appearance"
LOGNAME_CONFIGURATION = "configuration"
LOGNAME_DATASET = "dataset"
LOGNAME_EXPORT = "export"
LOGNAME_GEOMETRY = "geometry"
LOGNAME_PIPELINE = "pipeline"
LOGNAME_RELIGHT = "relight"
LOGNAME_RENDERING = "rendering"
LOGNAME_ROOT = "root"
LOGNAME_SYSTEM = "system"
LOGNAME_TRAINING = "training"
LOGNAME_UTILS = "utils"
LOGNAME_VALIDATION = "validation"

LOG_FILENAME = "hybrid_inverse_render.log"

_CONCERN_LOGGERS = [
    LOGNAME_APPEARANCE,
    LOGNAME_CONFIGURATION,
    LOGNAME_DATASET,
    LOGNAME_EXPORT,
    LOGNAME_GEOMETRY,
    LOGNAME_PIPELINE,
    LOGNAME_RELIGHT,
    LOGNAME_RENDERING,
    LOGNAME_SYSTEM,
    LOGNAME_TRAINING,
    LOGNAME_UTILS,
    LOGNAME_VALIDATION,
]

LOGGING_CONFIG: Dict[str, Any] = {
    "version": 1,
    "formatters": {
        "defaultFormatter": {"format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"}
    },
    "handlers": {
        "consoleHandler": {
            "class": "logging.StreamHandler",
            "level": "CRITICAL",
            "formatter": "defaultFormatter",
            "stream": "ext://sys.stderr",
        },
        "fileHandler": {
            "class": "logging.FileHandler",
            "level": "INFO",
            "formatter": "defaultFormatter",
            "filename": LOG_FILENAME,
            "mode": "a",
            "delay": True,
        },
    },
    "loggers": {
        LOGNAME_ROOT: {"level": "DEBUG", "handlers": ["consoleHandler", "fileHandler"]},
        **{
            name: {
                "level": "DEBUG",
                "handlers": ["consoleHandler", "fileHandler"],
                "propagate": False,
            }
            for name in _CONCERN_LOGGERS
        },
    },
}

# Configure logging using dictionary config
logging.config.dictConfig(LOGGING_CONFIG)

_VERBOSITY_LEVELS = {0: logging.CRITICAL, 1: logging.WARNING, 2: logging.INFO}


def get_logger(name: str) -> logging.Logger:
    """
    Get a configured logger instance with the specified name.

    Args:
        name (str): The name of the logger to retrieve, one of the LOGNAME_* constants.

    Returns:
        logging.Logger: A configured logger instance.

    Raises:
        ValueError: If the requested logger name is not configured.

    Example:
        >>> logger = get_logger(LOGNAME_GEOMETRY)
        >>> logger.info("Grid initialised to a sphere")
    """
    if name not in LOGGING_CONFIG["loggers"]:
        raise ValueError(
            f"Logger '{name}' is not currently supported. "
            f"Must be one of: {', '.join(LOGGING_CONFIG['loggers'].keys())}"
        )

    return logging.getLogger(name)


def set_console_level(verbosity: int) -> int:
    """Lower the console handler threshold for the given -v count.

    0 keeps the console silent (CRITICAL only), 1 shows warnings, 2 info and
    3 or more debug output. The file handler is left untouched.

    Args:
        verbosity: Number of -v flags given on the command line.

    Returns:
        int: The logging level applied to the console handlers.
    """
    level = _VERBOSITY_LEVELS.get(verbosity, logging.DEBUG) if verbosity >= 0 else logging.CRITICAL
    for name in LOGGING_CONFIG["loggers"]:
        for handler in logging.getLogger(name).handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(
                handler, logging.FileHandler
            ):
                handler.setLevel(level)
    return level
