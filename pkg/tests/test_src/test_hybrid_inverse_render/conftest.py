"""Test fixtures shared by every hybrid_inverse_render test package."""

import logging
from typing import Generator

import pytest
import torch
from _pytest.logging import LogCaptureFixture

from hybrid_inverse_render.appearance import EyePrior
from hybrid_inverse_render.geometry import SphereEyeballs

EYE_RADIUS = 0.1
EYE_LEFT = (-0.2, 0.1, 0.45)
EYE_RIGHT = (0.2, 0.1, 0.45)


@pytest.fixture
def eyes() -> SphereEyeballs:
    """Two eyeball spheres in front of a unit-scale head."""
    return SphereEyeballs(EYE_LEFT, EYE_RIGHT, EYE_RADIUS)


@pytest.fixture
def eye_prior() -> EyePrior:
    """Default predefined eye material."""
    return EyePrior()


@pytest.fixture
def generator() -> torch.Generator:
    """Seeded CPU generator."""
    return torch.Generator().manual_seed(1234)


@pytest.fixture
def capture_logger(caplog: LogCaptureFixture) -> Generator[logging.Logger, None, None]:
    """A throwaway logger feeding caplog, for patching over module loggers.

    The package loggers do not propagate, so caplog never sees their records.
    """
    caplog.set_level(logging.DEBUG)
    test_logger = logging.getLogger("hybrid_inverse_render_test")
    test_logger.handlers = [caplog.handler]
    test_logger.setLevel(logging.DEBUG)
    test_logger.propagate = False
    yield test_logger
    test_logger.handlers = []
