"""
Subpackage for utilities used in the hybrid_inverse_render package.
"""

from hybrid_inverse_render.utils.config_model import BaseConfigModel
from hybrid_inverse_render.utils.diagnostics import (
    DEGENERATE_NORMALS,
    FLASH_NEAR_SINGULAR,
    OUT_OF_BOUNDS,
    SKIPPED_OPTIMIZER_GROUPS,
    Diagnostics,
)
from hybrid_inverse_render.utils.dir_util import (
    get_config_dir,
    get_output_dir,
    path_is_simple_filename,
    resolve_config_path,
)
from hybrid_inverse_render.utils.edit_config import apply_overrides
from hybrid_inverse_render.utils.env import RuntimeEnv
from hybrid_inverse_render.utils.exceptions import (
    EXIT_INTERNAL_ERROR,
    EXIT_USER_ERROR,
    ConfigurationException,
    DatasetException,
    ErrorSeverity,
    ExportException,
    FittingException,
    HybridRenderException,
    InvariantException,
    SystemException,
    ValidationException,
    handle_pydantic_validation_errors,
)
from hybrid_inverse_render.utils.logging_util import (
    LOGNAME_APPEARANCE,
    LOGNAME_CONFIGURATION,
    LOGNAME_DATASET,
    LOGNAME_EXPORT,
    LOGNAME_GEOMETRY,
    LOGNAME_PIPELINE,
    LOGNAME_RELIGHT,
    LOGNAME_RENDERING,
    LOGNAME_ROOT,
    LOGNAME_SYSTEM,
    LOGNAME_TRAINING,
    LOGNAME_UTILS,
    LOGNAME_VALIDATION,
    get_logger,
    set_console_level,
)

__all__ = [
    "BaseConfigModel",
    "RuntimeEnv",
    "Diagnostics",
    "DEGENERATE_NORMALS",
    "FLASH_NEAR_SINGULAR",
    "OUT_OF_BOUNDS",
    "SKIPPED_OPTIMIZER_GROUPS",
    "get_logger",
    "set_console_level",
    "LOGNAME_APPEARANCE",
    "LOGNAME_CONFIGURATION",
    "LOGNAME_DATASET",
    "LOGNAME_EXPORT",
    "LOGNAME_GEOMETRY",
    "LOGNAME_PIPELINE",
    "LOGNAME_RELIGHT",
    "LOGNAME_RENDERING",
    "LOGNAME_ROOT",
    "LOGNAME_SYSTEM",
    "LOGNAME_TRAINING",
    "LOGNAME_UTILS",
    "LOGNAME_VALIDATION",
    "EXIT_INTERNAL_ERROR",
    "EXIT_USER_ERROR",
    "ConfigurationException",
    "DatasetException",
    "ErrorSeverity",
    "ExportException",
    "FittingException",
    "HybridRenderException",
    "InvariantException",
    "SystemException",
    "ValidationException",
    "handle_pydantic_validation_errors",
    "apply_overrides",
    "get_config_dir",
    "get_output_dir",
    "path_is_simple_filename",
    "resolve_config_path",
]
