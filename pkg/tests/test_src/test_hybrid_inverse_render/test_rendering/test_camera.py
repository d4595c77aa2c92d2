"""Tests for the pinhole camera."""

import pytest
import torch

from hybrid_inverse_render.rendering import (
    Camera,
    camera_from_dict,
    intrinsics_from_fov,
    look_at,
    orbit_cameras,
)
from hybrid_inverse_render.utils import DatasetException, ValidationException


def test_look_at_axes() -> None:
    """Columns are right, down and forward; the last column is the centre."""
    pose = look_at((0.0, 0.0, 3.0))

    assert pose[:, 3].tolist() == [0.0, 0.0, 3.0]
    assert pose[:, 2].tolist() == pytest.approx([0.0, 0.0, -1.0])
    assert pose[:, 1].tolist() == pytest.approx([0.0, -1.0, 0.0])
    assert torch.allclose(pose[:, :3].T @ pose[:, :3], torch.eye(3, dtype=torch.float64))


def test_look_at_parallel_up() -> None:
    """An up vector along the viewing direction is rejected."""
    with pytest.raises(ValidationException):
        look_at((0.0, 3.0, 0.0))


def test_intrinsics_from_fov() -> None:
    """A 90 degree field of view puts the focal length at half the width."""
    intrinsics = intrinsics_from_fov(64, 48, 90.0)

    assert intrinsics[0, 0].item() == pytest.approx(32.0)
    assert intrinsics[1, 1].item() == pytest.approx(32.0)
    assert intrinsics[:2, 2].tolist() == [32.0, 24.0]


def test_rays_are_row_major(camera: Camera) -> None:
    """One unit ray per pixel; the centre pixel looks along the optical axis."""
    origins, directions = camera.generate_rays(torch.float64)

    assert origins.shape == directions.shape == (63, 3)
    assert torch.allclose(directions.norm(dim=-1), torch.ones(63, dtype=torch.float64))
    centre = 3 * camera.width + 4
    assert directions[centre].tolist() == pytest.approx(camera.optical_axis.tolist())
    # moving one column to the right moves the ray towards +x for this camera
    assert directions[centre + 1, 0] > directions[centre, 0]


def test_project_inverts_pixel_rays(camera: Camera) -> None:
    """Points along pixel rays project back onto the pixel centres."""
    rows = torch.tensor([0, 3, 6])
    cols = torch.tensor([0, 4, 8])
    origins, directions = camera.pixel_rays(rows, cols, torch.float64)

    uv, depth = camera.project(origins + 2.0 * directions)

    assert uv[:, 0].tolist() == pytest.approx((cols + 0.5).tolist())
    assert uv[:, 1].tolist() == pytest.approx((rows + 0.5).tolist())
    assert (depth > 0).all()


def test_in_frustum(camera: Camera) -> None:
    """Points behind the camera or off-image are outside the frustum."""
    points = torch.tensor(
        [[0.0, 0.0, 0.0], [0.0, 0.0, 5.0], [10.0, 0.0, 0.0]], dtype=torch.float64
    )

    assert camera.in_frustum(points).tolist() == [True, False, False]


def test_scaled(camera: Camera) -> None:
    """Scaling keeps the field of view and the pose."""
    doubled = camera.scaled(2.0)

    assert (doubled.width, doubled.height) == (18, 14)
    assert doubled.intrinsics[0, 0].item() == pytest.approx(2.0 * camera.intrinsics[0, 0].item())
    assert torch.equal(doubled.pose, camera.pose)


def test_orbit_cameras_face_origin() -> None:
    """Every orbit camera sees the origin at its principal point, deterministically."""
    cameras = orbit_cameras(5, 3.0, 16, 12, 30.0, seed=3)
    again = orbit_cameras(5, 3.0, 16, 12, 30.0, seed=3)

    assert len(cameras) == 5
    for camera, repeat in zip(cameras, again):
        uv, _ = camera.project(torch.zeros(1, 3, dtype=torch.float64))
        assert uv[0].tolist() == pytest.approx([8.0, 6.0])
        assert camera.origin.norm().item() == pytest.approx(3.0)
        assert torch.equal(camera.pose, repeat.pose)


def test_invalid_camera() -> None:
    """Wrong matrix shapes and empty images are rejected."""
    with pytest.raises(ValidationException):
        Camera(torch.eye(3), torch.eye(3), 4, 4)
    with pytest.raises(ValidationException):
        Camera(torch.eye(3), torch.zeros(3, 4), 0, 4)


@pytest.mark.parametrize(
    "entry",
    [{}, {"pose": [[1.0, 0.0, 0.0]]}, {"pose": [[float("nan")] * 4] * 3}, {"pose": "bad"}],
)
def test_camera_from_dict_rejects_corrupt_pose(entry: dict) -> None:
    """Corrupted pose entries name the frame."""
    with pytest.raises(DatasetException, match="frame 0007"):
        camera_from_dict(entry, torch.eye(3, dtype=torch.float64), 4, 4, "0007")


def test_camera_from_dict() -> None:
    """A valid entry builds the camera."""
    pose = look_at((0.0, 0.0, 2.0))

    camera = camera_from_dict(
        {"pose": pose.tolist()}, intrinsics_from_fov(4, 4, 50.0), 4, 4, "0000"
    )

    assert torch.equal(camera.pose, pose)
    assert camera.to_dict() == {"pose": pose.tolist()}
