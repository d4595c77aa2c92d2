"""
Factory module for creating configured subcommand instances.

Classes:
    CommandFactory: Creates subcommand instances from the registry.
"""

from typing import List, Type

from hybrid_inverse_render.pipeline.commands.base import CommandBase, CommandContext
from hybrid_inverse_render.pipeline.commands.registry import CommandRegistry


class CommandFactory:
    """Factory for creating subcommands using dependency injection."""

    def __init__(self, registry: CommandRegistry):
        """
        Initialize the factory with a command registry.

        Args:
            registry (CommandRegistry): The registry containing command classes.
        """
        self._registry = registry

    def command_class(self, name: str) -> Type[CommandBase]:
        """Class implementing subcommand ``name``."""
        return self._registry.get_command_class(name)

    def create_command(self, name: str, context: CommandContext) -> CommandBase:
        """
        Create a subcommand bound to ``context``.

        Args:
            name (str): Subcommand name.
            context (CommandContext): Arguments, configuration and output location.

        Returns:
            CommandBase: Ready-to-run subcommand.
        """
        return self.command_class(name)(context)

    def list_available_commands(self) -> List[str]:
        """Registered subcommand names."""
        return self._registry.list_registered_commands()
