"""Fixtures for the pipeline tests."""

from pathlib import Path

import pytest
from rich.console import Console

from hybrid_inverse_render.pipeline import RichDisplay


@pytest.fixture
def test_config_path(config_dir: Path) -> Path:
    """Tiny float64 run configuration."""
    return config_dir / "test_config.json"


@pytest.fixture
def display() -> RichDisplay:
    """Rich display writing to the captured stdout."""
    return RichDisplay(Console(width=120, force_terminal=False))
