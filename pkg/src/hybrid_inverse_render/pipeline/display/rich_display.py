"""Rich-based implementation of display interface."""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, Sequence

from rich.console import Console
from rich.markdown import Markdown
from rich.progress import BarColumn, Progress, TextColumn, TimeRemainingColumn
from rich.table import Table

from .abstract_display import DisplayInterface, ProgressUpdate


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class RichDisplay(DisplayInterface):
    """Rich library implementation of display interface."""

    def __init__(self, console: Optional[Console] = None) -> None:
        """Initialize Rich console."""
        self.console = console or Console()

    def show_text(self, text: str) -> None:
        """Display markdown formatted text.

        Args:
            text: Text to display as markdown
        """
        self.console.print(Markdown(f"{text}"))

    def show_table(
        self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]
    ) -> None:
        """Display rows in a rich table."""
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_format_cell(value) for value in row))
        self.console.print(table)

    @contextmanager
    def progress(self, description: str, total: int) -> Iterator[ProgressUpdate]:
        """Rich progress bar showing the latest total loss."""
        columns = (
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TextColumn("{task.fields[loss]}"),
            TimeRemainingColumn(),
        )
        with Progress(*columns, console=self.console, transient=True) as bar:
            task = bar.add_task(description, total=total, loss="")

            def update(step: int, _total: int, breakdown: Dict[str, float]) -> None:
                loss = breakdown.get("total")
                text = "" if loss is None else f"loss {loss:.4g}"
                bar.update(task, completed=step, loss=text)

            yield update
