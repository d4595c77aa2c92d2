""" Error management for the hybrid_inverse_render command line. """

from typing import Dict, Type

from hybrid_inverse_render.utils import (
    EXIT_INTERNAL_ERROR,
    LOGNAME_CONFIGURATION,
    LOGNAME_DATASET,
    LOGNAME_EXPORT,
    LOGNAME_ROOT,
    LOGNAME_SYSTEM,
    LOGNAME_TRAINING,
    LOGNAME_VALIDATION,
    ConfigurationException,
    DatasetException,
    ExportException,
    FittingException,
    HybridRenderException,
    InvariantException,
    SystemException,
    ValidationException,
    get_logger,
)

# Mapping of exception types to specific logger names
LOGGER_MAPPING: Dict[Type[Exception], str] = {
    ConfigurationException: LOGNAME_CONFIGURATION,
    DatasetException: LOGNAME_DATASET,
    ExportException: LOGNAME_EXPORT,
    FittingException: LOGNAME_TRAINING,
    InvariantException: LOGNAME_TRAINING,
    SystemException: LOGNAME_SYSTEM,
    ValidationException: LOGNAME_VALIDATION,
}


def handle_error(error: Exception) -> int:
    """
    Handle errors by logging them and providing user-friendly messages.

    Args:
        error (Exception): The exception to be handled. Can be a HybridRenderException
            or any other Exception type.

    Returns:
        int: Exit status code:
            - 1: User or configuration errors (bad flags, invalid config, unreadable
              dataset, nothing to export)
            - 2: Internal errors (violated numerical invariants, divergence,
              I/O failures and unexpected exceptions)
    """

    # Safe lookup with default to "root"
    logger_name = LOGGER_MAPPING.get(type(error), LOGNAME_ROOT)
    logger = get_logger(logger_name)

    if isinstance(error, HybridRenderException):
        logger.error(
            "Error occurred (%s): %s",
            error.severity.name,
            error.message,
            exc_info=error.original_error or error,
        )
        print(f"\nError: {error.user_message}")
        return error.exit_code

    # Unexpected error - log full details
    logger.error("An unexpected error occurred: %s", str(error), exc_info=True)
    print(
        "\nAn unexpected error occurred please review the application logs for more information."
    )
    return EXIT_INTERNAL_ERROR
