"""Fixtures for the export tests."""

from typing import Callable

import numpy as np
import pytest
import torch

from hybrid_inverse_render.appearance import EyePrior
from hybrid_inverse_render.export import TriangleMesh
from hybrid_inverse_render.geometry import SphereEyeballs
from hybrid_inverse_render.rendering import (
    Camera,
    HybridScene,
    build_grid_scene,
    intrinsics_from_fov,
    look_at,
)

HEAD_RADIUS = 0.5


@pytest.fixture
def head_scene(eyes: SphereEyeballs, eye_prior: EyePrior) -> HybridScene:
    """Sphere-initialised float64 scene with eyeballs."""
    return build_grid_scene(
        (9, 17), eyes, eye_prior, r0=HEAD_RADIUS, beta=0.01, dtype=torch.float64
    )


@pytest.fixture
def ball_sdf() -> Callable[[torch.Tensor], torch.Tensor]:
    """Exact SDF of a sphere of radius 0.5 at the origin."""

    def sdf(points: torch.Tensor) -> torch.Tensor:
        return points.norm(dim=-1) - HEAD_RADIUS

    return sdf


@pytest.fixture
def front_camera() -> Camera:
    """Wide camera on +z looking at the origin."""
    return Camera(intrinsics_from_fov(32, 32, 60.0), look_at((0.0, 0.0, 3.0)), 32, 32)


@pytest.fixture
def patches() -> TriangleMesh:
    """A two-triangle quad, a lone triangle and a second lone triangle, all disjoint."""
    vertices = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [5.0, 0.0, 0.0],
            [6.0, 0.0, 0.0],
            [5.0, 1.0, 0.0],
            [8.0, 0.0, 0.0],
            [9.0, 0.0, 0.0],
            [8.0, 1.0, 0.0],
        ]
    )
    triangles = np.array([[4, 5, 6], [0, 1, 2], [0, 2, 3], [7, 8, 9]], dtype=np.int64)
    return TriangleMesh(vertices, triangles)
