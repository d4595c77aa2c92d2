"""
Subpackage for the command line pipeline: run configuration loading, console
display, subcommands and run records.
"""

from hybrid_inverse_render.pipeline.commands import (
    CommandBase,
    CommandContext,
    CommandFactory,
    CommandRegistry,
    register_command,
)
from hybrid_inverse_render.pipeline.display import (
    DisplayInterface,
    ProgressUpdate,
    RichDisplay,
    create_display,
)
from hybrid_inverse_render.pipeline.loader import (
    LightConfig,
    RunConfig,
    SceneConfig,
    load_run_config,
    read_config_document,
)
from hybrid_inverse_render.pipeline.run_record import (
    RUN_RECORD_FILENAME,
    RunRecord,
    write_run_record,
)

__all__ = [
    "CommandBase",
    "CommandContext",
    "CommandFactory",
    "CommandRegistry",
    "register_command",
    "DisplayInterface",
    "ProgressUpdate",
    "RichDisplay",
    "create_display",
    "LightConfig",
    "RunConfig",
    "SceneConfig",
    "load_run_config",
    "read_config_document",
    "RUN_RECORD_FILENAME",
    "RunRecord",
    "write_run_record",
]
