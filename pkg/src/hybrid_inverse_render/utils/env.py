"""
This module contains the RuntimeEnv class, which loads runtime settings for
the pipeline from the environment and an optional .env file.

The RuntimeEnv class handles:
- Loading environment variables from a .env file in the current directory
- Resolving the default worker count (HIR_WORKERS, else available cores)
- Logging which HIR_* settings are active
"""

import os
from pathlib import Path

from dotenv import load_dotenv

from hybrid_inverse_render.utils.logging_util import LOGNAME_CONFIGURATION, get_logger

ENV_PREFIX = "HIR_"
WORKERS_ENV_VAR = "HIR_WORKERS"

logger = get_logger(LOGNAME_CONFIGURATION)


class RuntimeEnv:
    """Loads and reports runtime environment settings."""

    @staticmethod
    def setup_env() -> None:
        """Load the .env file if present and log the active HIR_* settings."""
        RuntimeEnv._load_config()

    @staticmethod
    def default_workers() -> int:
        """Worker count from HIR_WORKERS, falling back to the number of available cores."""
        value = os.getenv(WORKERS_ENV_VAR)
        if value is not None:
            try:
                workers = int(value)
                if workers > 0:
                    return workers
            except ValueError:
                pass
            logger.warning("Ignoring invalid %s value: %s", WORKERS_ENV_VAR, value)
        if hasattr(os, "sched_getaffinity"):
            return max(1, len(os.sched_getaffinity(0)))
        return os.cpu_count() or 1

    @staticmethod
    def _load_config() -> None:
        """Initialize environment by loading .env file if present.

        Does not enforce any specific keys, every setting has a default.
        """
        dotenv_path = Path.cwd() / ".env"

        if os.path.exists(dotenv_path):
            load_dotenv(dotenv_path=dotenv_path)
            logger.info("Loaded environment from: %s", dotenv_path)
        else:
            logger.info("No .env file found in current directory with path: %s", dotenv_path)

        for env_var in sorted(os.environ):
            if env_var.startswith(ENV_PREFIX):
                logger.info("%s is set in environment: %s", env_var, os.environ[env_var])
