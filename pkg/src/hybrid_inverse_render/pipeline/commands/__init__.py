"""
Subpackage for the pipeline subcommands. Command modules are discovered and
imported by the registry.
"""

from hybrid_inverse_render.pipeline.commands.base import CommandBase, CommandContext
from hybrid_inverse_render.pipeline.commands.factory import CommandFactory
from hybrid_inverse_render.pipeline.commands.registry import CommandRegistry, register_command

__all__ = [
    "CommandBase",
    "CommandContext",
    "CommandFactory",
    "CommandRegistry",
    "register_command",
]
