"""Fixtures for the fitting tests: two tiny views of a sphere-initialised scene."""

import numpy as np
import pytest
import torch

from hybrid_inverse_render.appearance import CombinedLight, EyePrior
from hybrid_inverse_render.data import CaptureDataset, Frame, Label
from hybrid_inverse_render.geometry import SphereEyeballs
from hybrid_inverse_render.rendering import (
    Camera,
    HybridScene,
    RenderConfig,
    build_grid_scene,
    intrinsics_from_fov,
    look_at,
)
from hybrid_inverse_render.training import ScaleCompensator, TrainConfig

WIDTH = 8
HEIGHT = 6


def _frame(index: int, eye: tuple) -> Frame:
    labels = np.zeros((HEIGHT, WIDTH), dtype=np.uint8)
    labels[1:5, 2:6] = Label.SKIN
    labels[1, 2] = Label.HAIR
    labels[3, 4] = Label.EYE
    image = np.full((HEIGHT, WIDTH, 3), 0.05, dtype=np.float32)
    image[labels != Label.BACKGROUND] = 0.4
    return Frame(
        frame_id=f"{index:04d}",
        image=image,
        camera=Camera(intrinsics_from_fov(WIDTH, HEIGHT, 40.0), look_at(eye), WIDTH, HEIGHT),
        labels=labels,
        pseudo_spec=np.full((HEIGHT, WIDTH), 0.1, dtype=np.float32),
        albedo=np.full((HEIGHT, WIDTH, 3), 0.4, dtype=np.float32),
    )


@pytest.fixture
def sphere_dataset() -> CaptureDataset:
    """Front and side view with a labelled block in the middle."""
    return CaptureDataset([_frame(0, (0.0, 0.0, 3.0)), _frame(1, (3.0, 0.0, 0.5))])


@pytest.fixture
def fit_scene(eyes: SphereEyeballs, eye_prior: EyePrior) -> HybridScene:
    """Coarse float64 scene to optimise."""
    return build_grid_scene((5, 9), eyes, eye_prior, r0=0.5, beta=0.05, dtype=torch.float64)


@pytest.fixture
def fit_light() -> CombinedLight:
    """Light with occlusion rows for both frames."""
    return CombinedLight(
        flash_scale=4.0, k00_init=-1.0, view_ids=["0000", "0001"], dtype=torch.float64
    )


@pytest.fixture
def compensator() -> ScaleCompensator:
    """k = 1."""
    return ScaleCompensator(1.0, dtype=torch.float64)


@pytest.fixture
def coarse_render_config() -> RenderConfig:
    """Few samples per ray; enough to exercise the fitting loop."""
    return RenderConfig(samples_per_ray=16, far=6.0, trace_step=0.05)


@pytest.fixture
def short_schedule() -> TrainConfig:
    """Six steps, four of them volume rendered."""
    return TrainConfig(
        total_iters=6,
        stage1_iters=4,
        lr0=1e-2,
        lr_decay_every=3,
        rays_per_batch=16,
        log_every=2,
        holdout_every=0,
    )
