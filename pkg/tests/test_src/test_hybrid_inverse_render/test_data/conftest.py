"""Fixtures for the capture data tests."""

import numpy as np
import pytest

from hybrid_inverse_render.data import CaptureDataset, Frame, Label
from hybrid_inverse_render.rendering import Camera, intrinsics_from_fov, look_at

WIDTH = 5
HEIGHT = 4


def make_frame(index: int, with_albedo: bool = False) -> Frame:
    """Frame with a labelled 2x3 block and seeded image content."""
    rng = np.random.default_rng(index)
    labels = np.zeros((HEIGHT, WIDTH), dtype=np.uint8)
    labels[1:3, 1:4] = Label.SKIN
    labels[1, 2] = Label.EYE
    labels[0, 0] = Label.HAIR
    camera = Camera(
        intrinsics_from_fov(WIDTH, HEIGHT, 45.0), look_at((0.3 * index, 0.0, 3.0)), WIDTH, HEIGHT
    )
    return Frame(
        frame_id=f"{index:04d}",
        image=rng.uniform(0.0, 1.0, (HEIGHT, WIDTH, 3)).astype(np.float32),
        camera=camera,
        labels=labels,
        pseudo_spec=rng.uniform(0.0, 1.0, (HEIGHT, WIDTH)).astype(np.float32),
        albedo=rng.uniform(0.0, 1.0, (HEIGHT, WIDTH, 3)).astype(np.float32)
        if with_albedo
        else None,
    )


@pytest.fixture
def dataset() -> CaptureDataset:
    """Three hand-made frames sharing one camera model."""
    return CaptureDataset(
        [make_frame(i, with_albedo=True) for i in range(3)], {"iso": "300", "fps": "30"}
    )
