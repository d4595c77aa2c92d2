"""
Core framework for pipeline subcommands.

Implementation:
    Extend CommandBase and register the class with the command registry:
    ```python
    @register_command("render")
    class RenderCommand(CommandBase):
        help = "Render views of a fitted scene"

        @classmethod
        def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
            parser.add_argument("--scene", required=True)

        def execute(self) -> Dict[str, Any]:
            ...
    ```
"""

import argparse
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, ClassVar, Dict, Mapping

from hybrid_inverse_render.pipeline.display import DisplayInterface
from hybrid_inverse_render.pipeline.loader import RunConfig


@dataclass
class CommandContext:
    """Everything a subcommand needs to run.

    Attributes:
        args: Parsed command line arguments
        config: Validated run configuration (flags already applied)
        out_dir: Output directory of the run
        display: Console display
        seed: Seed shared by every random process of the run
        workers: Worker (thread) count
    """

    args: argparse.Namespace
    config: RunConfig
    out_dir: Path
    display: DisplayInterface
    seed: int
    workers: int


class CommandBase(ABC):
    """Base class of every subcommand.

    Subclasses declare their flags in :meth:`add_arguments`, map them onto
    dotted configuration keys in :meth:`config_overrides` and do their work in
    :meth:`execute`, returning results recorded in ``run.json``.
    """

    help: ClassVar[str] = ""

    def __init__(self, context: CommandContext) -> None:
        self.context = context

    @property
    def config(self) -> RunConfig:
        """The run configuration."""
        return self.context.config

    @property
    def display(self) -> DisplayInterface:
        """The console display."""
        return self.context.display

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Declare command-specific flags (none by default)."""

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Mapping[str, Any]:
        """Dotted-key configuration overrides taken from the flags (none by default)."""
        del args
        return {}

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """Run the command.

        Returns:
            Dict[str, Any]: Results stored in the run record
        """
