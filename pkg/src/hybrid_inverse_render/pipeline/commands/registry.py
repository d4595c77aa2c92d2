"""
Singleton registry for managing subcommand registration and lookup.

This module implements a singleton registry that maintains mappings between
subcommand names and their implementing classes. It provides automatic
discovery and registration of command implementations through file system scanning.

Classes:
    CommandRegistry: Singleton registry managing subcommand class registration and lookup.

Functions:
    register_command: Decorator for registering subcommand implementations with the registry.
"""

import importlib
import os
from typing import Callable, Dict, List, Type

from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.utils import (
    LOGNAME_PIPELINE,
    ConfigurationException,
    ErrorSeverity,
    get_logger,
)

logger = get_logger(LOGNAME_PIPELINE)

_SKIPPED_MODULES = {"__init__.py", "base.py", "registry.py", "factory.py", "common.py"}


class CommandRegistry:
    """Registry for managing subcommands and their corresponding classes.

    This class implements a singleton pattern to ensure that only one instance
    of the registry exists. It allows for the registration and retrieval of
    command classes based on their names.
    """

    _instance = None

    def __new__(cls) -> "CommandRegistry":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if not hasattr(self, "_initialized"):
            self._command_classes: Dict[str, Type[CommandBase]] = {}
            self._initialized = True
            self.import_command_modules()

    def register_command(self, name: str, command_class: Type[CommandBase]) -> None:
        """Register a subcommand with its implementing class.

        Args:
            name (str): The subcommand name as typed on the command line.
            command_class (Type[CommandBase]): The class implementing it.
        """
        self._command_classes[name.lower()] = command_class

    def get_command_class(self, name: str) -> Type[CommandBase]:
        """Get the class implementing subcommand ``name``.

        Raises:
            ConfigurationException: If the subcommand is not registered.
        """
        command_class = self._command_classes.get(name.lower())
        if not command_class:
            error_msg = f"Unknown subcommand: {name}"
            raise ConfigurationException(
                message=error_msg,
                user_message=f"{error_msg}, run with --help to list the subcommands",
                severity=ErrorSeverity.ERROR,
            )
        return command_class

    def import_command_modules(self) -> None:
        """Import every module in 'hybrid_inverse_render/pipeline/commands' so they register."""
        commands_dir = os.path.dirname(__file__)
        for filename in sorted(os.listdir(commands_dir)):
            if filename.endswith(".py") and filename not in _SKIPPED_MODULES:
                module_name = f"hybrid_inverse_render.pipeline.commands.{filename[:-3]}"
                logger.debug("Registering module: %s", module_name)
                importlib.import_module(module_name)

    def is_command_registered(self, name: str) -> bool:
        """True if subcommand ``name`` is registered."""
        return name.lower() in self._command_classes

    def list_registered_commands(self) -> List[str]:
        """Registered subcommand names, sorted."""
        return sorted(self._command_classes)


def register_command(name: str) -> Callable[[Type[CommandBase]], Type[CommandBase]]:
    """Decorator to register a subcommand class with the singleton registry.

    Args:
        name (str): The subcommand name.

    Returns:
        Callable: A decorator function that registers the class.
    """

    def decorator(cls: Type[CommandBase]) -> Type[CommandBase]:
        CommandRegistry().register_command(name, cls)
        return cls

    return decorator
