""" top level module for the tests defined in the tests directory """

from pathlib import Path
from typing import Generator

import pytest
import torch

from hybrid_inverse_render.utils import Diagnostics


@pytest.fixture
def config_dir() -> Path:
    """returns the path to the test config data directory"""
    return Path(__file__).parent / "config"


@pytest.fixture(autouse=True)
def reset_diagnostics() -> Generator[None, None, None]:
    """Start and finish every test with empty diagnostics counters."""
    Diagnostics.reset()
    yield
    Diagnostics.reset()


@pytest.fixture(autouse=True)
def nondeterministic_default() -> Generator[None, None, None]:
    """Undo the deterministic-algorithm switch the command line turns on."""
    yield
    torch.use_deterministic_algorithms(False)
