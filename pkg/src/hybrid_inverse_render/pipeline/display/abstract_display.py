"""Abstract base class for display implementations."""

from abc import ABC, abstractmethod
from typing import Any, Callable, ContextManager, Dict, Mapping, Sequence

ProgressUpdate = Callable[[int, int, Dict[str, float]], None]


class DisplayInterface(ABC):
    """Abstract base class defining display interface."""

    @abstractmethod
    def show_text(self, text: str) -> None:
        """Display text.

        Args:
            text: Text to display
        """
        pass  # pylint: disable=unnecessary-pass

    @abstractmethod
    def show_table(
        self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]
    ) -> None:
        """Display a table.

        Args:
            title: Table caption
            columns: Column headers
            rows: One sequence of cell values per row
        """
        pass  # pylint: disable=unnecessary-pass

    def show_mapping(self, title: str, values: Mapping[str, Any]) -> None:
        """Display key/value pairs as a two-column table."""
        self.show_table(title, ["name", "value"], [[k, v] for k, v in values.items()])

    @abstractmethod
    def progress(self, description: str, total: int) -> ContextManager[ProgressUpdate]:
        """Context manager yielding a callback that advances a progress display.

        Args:
            description: Label of the task
            total: Number of steps

        Returns:
            Context manager whose value is called with (step, total, loss breakdown)
        """
        pass  # pylint: disable=unnecessary-pass
