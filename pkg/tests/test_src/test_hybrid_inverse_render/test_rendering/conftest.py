"""Fixtures for the rendering tests: a small sphere scene seen from +z."""

import pytest
import torch

from hybrid_inverse_render.appearance import CombinedLight, EyePrior
from hybrid_inverse_render.geometry import SphereEyeballs
from hybrid_inverse_render.rendering import (
    Camera,
    HybridScene,
    RenderConfig,
    build_grid_scene,
    intrinsics_from_fov,
    look_at,
)

SPHERE_RADIUS = 0.5
CAMERA_DISTANCE = 3.0


@pytest.fixture
def scene(eyes: SphereEyeballs, eye_prior: EyePrior) -> HybridScene:
    """Sphere-initialised float64 scene with a sharp density."""
    return build_grid_scene(
        (9, 17), eyes, eye_prior, r0=SPHERE_RADIUS, beta=0.005, dtype=torch.float64
    )


@pytest.fixture
def light() -> CombinedLight:
    """Flash plus a constant ambient term."""
    return CombinedLight(flash_scale=4.0, k00_init=0.5, dtype=torch.float64)


@pytest.fixture
def render_config() -> RenderConfig:
    """Dense enough sampling for a unit-scale scene."""
    return RenderConfig(samples_per_ray=128, far=6.0, chunk_size=7, trace_step=0.05)


@pytest.fixture
def camera() -> Camera:
    """9x7 camera on the +z axis looking at the origin."""
    return Camera(intrinsics_from_fov(9, 7, 40.0), look_at((0.0, 0.0, CAMERA_DISTANCE)), 9, 7)


@pytest.fixture
def front_ray() -> tuple:
    """Ray along -z through the sphere centre."""
    origin = torch.tensor([[0.0, 0.0, CAMERA_DISTANCE]], dtype=torch.float64)
    direction = torch.tensor([[0.0, 0.0, -1.0]], dtype=torch.float64)
    return origin, direction
