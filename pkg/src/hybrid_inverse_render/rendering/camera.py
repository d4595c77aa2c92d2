"""
Pinhole cameras in the OpenCV convention: x right, y down, z forward.

``pose`` is the 3x4 world-from-camera matrix [R | t]; t is the camera centre,
which is also the position of the co-located flashlight. Rays pass through
pixel centres (u + 0.5, v + 0.5) and are enumerated row-major.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import torch
from torch import Tensor

from hybrid_inverse_render.utils import DatasetException, ErrorSeverity, ValidationException


@dataclass
class Camera:
    """Intrinsics, pose and image size of one view."""

    intrinsics: Tensor
    pose: Tensor
    width: int
    height: int

    def __post_init__(self) -> None:
        self.intrinsics = torch.as_tensor(self.intrinsics, dtype=torch.float64)
        self.pose = torch.as_tensor(self.pose, dtype=torch.float64)
        if self.intrinsics.shape != (3, 3) or self.pose.shape != (3, 4):
            raise ValidationException(
                message=(
                    f"Camera needs 3x3 intrinsics and a 3x4 pose, got "
                    f"{tuple(self.intrinsics.shape)} and {tuple(self.pose.shape)}"
                ),
                severity=ErrorSeverity.ERROR,
            )
        if self.width <= 0 or self.height <= 0:
            raise ValidationException(
                message=f"Camera image size must be positive, got {self.width}x{self.height}",
                severity=ErrorSeverity.ERROR,
            )

    @property
    def rotation(self) -> Tensor:
        """World-from-camera rotation (3, 3)."""
        return self.pose[:, :3]

    @property
    def origin(self) -> Tensor:
        """Camera centre in world space (3,)."""
        return self.pose[:, 3]

    @property
    def optical_axis(self) -> Tensor:
        """Unit viewing direction in world space (3,)."""
        return self.rotation[:, 2]

    @property
    def pixel_count(self) -> int:
        """Number of pixels."""
        return self.width * self.height

    def pixel_rays(
        self, rows: Tensor, cols: Tensor, dtype: torch.dtype = torch.float32
    ) -> Tuple[Tensor, Tensor]:
        """Origins and unit directions (N, 3) through the centres of the given pixels."""
        pixels = torch.stack(
            [
                cols.to(torch.float64) + 0.5,
                rows.to(torch.float64) + 0.5,
                torch.ones(rows.shape[0], dtype=torch.float64),
            ],
            dim=-1,
        )
        camera_dirs = pixels @ torch.linalg.inv(self.intrinsics).T
        world_dirs = camera_dirs @ self.rotation.T
        world_dirs = world_dirs / world_dirs.norm(dim=-1, keepdim=True)
        origins = self.origin.expand_as(world_dirs)
        return origins.to(dtype).contiguous(), world_dirs.to(dtype)

    def generate_rays(self, dtype: torch.dtype = torch.float32) -> Tuple[Tensor, Tensor]:
        """Rays for every pixel, row-major, each (H * W, 3)."""
        rows, cols = torch.meshgrid(
            torch.arange(self.height), torch.arange(self.width), indexing="ij"
        )
        return self.pixel_rays(rows.reshape(-1), cols.reshape(-1), dtype)

    def project(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Pixel coordinates (N, 2) as (u, v) and camera-space depth (N,) of world points."""
        camera_points = (points.to(torch.float64) - self.origin) @ self.rotation
        depth = camera_points[:, 2]
        safe_depth = torch.where(depth.abs() > 1e-12, depth, torch.full_like(depth, 1e-12))
        homogeneous = (camera_points / safe_depth[:, None]) @ self.intrinsics.T
        return homogeneous[:, :2], depth

    def in_frustum(self, points: Tensor) -> Tensor:
        """True for points in front of the camera that project inside the image."""
        uv, depth = self.project(points)
        return (
            (depth > 0.0)
            & (uv[:, 0] >= 0.0)
            & (uv[:, 0] < self.width)
            & (uv[:, 1] >= 0.0)
            & (uv[:, 1] < self.height)
        )

    def scaled(self, factor: float) -> "Camera":
        """Same view at ``factor`` times the resolution."""
        scale = torch.diag(torch.tensor([factor, factor, 1.0], dtype=torch.float64))
        return Camera(
            intrinsics=scale @ self.intrinsics,
            pose=self.pose.clone(),
            width=max(1, int(round(self.width * factor))),
            height=max(1, int(round(self.height * factor))),
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly form (intrinsics are stored once per dataset)."""
        return {"pose": self.pose.tolist()}


def intrinsics_from_fov(width: int, height: int, fov_deg: float) -> Tensor:
    """Pinhole intrinsics with the given horizontal field of view, principal point centred."""
    focal = 0.5 * width / math.tan(0.5 * math.radians(fov_deg))
    return torch.tensor(
        [[focal, 0.0, 0.5 * width], [0.0, focal, 0.5 * height], [0.0, 0.0, 1.0]],
        dtype=torch.float64,
    )


def look_at(
    eye: Sequence[float],
    target: Sequence[float] = (0.0, 0.0, 0.0),
    up: Sequence[float] = (0.0, 1.0, 0.0),
) -> Tensor:
    """World-from-camera pose (3, 4) of a camera at ``eye`` looking at ``target``."""
    eye_t = torch.tensor(eye, dtype=torch.float64)
    forward = torch.tensor(target, dtype=torch.float64) - eye_t
    forward = forward / forward.norm()
    right = torch.linalg.cross(forward, torch.tensor(up, dtype=torch.float64))
    if float(right.norm()) < 1e-9:
        raise ValidationException(
            message=f"Camera up vector {list(up)} is parallel to the viewing direction",
            severity=ErrorSeverity.ERROR,
        )
    right = right / right.norm()
    down = torch.linalg.cross(forward, right)
    rotation = torch.stack([right, down, forward], dim=1)
    return torch.cat([rotation, eye_t[:, None]], dim=1)


def orbit_cameras(
    n_views: int,
    radius: float,
    width: int,
    height: int,
    fov_deg: float,
    azimuth_span_deg: float = 150.0,
    elevation_deg: float = 10.0,
    seed: int = 0,
) -> List[Camera]:
    """Cameras on an arc in front of the subject (+z), all aimed at the origin.

    Azimuths are evenly spaced over ``azimuth_span_deg``; elevations alternate
    around zero with a small seeded jitter.
    """
    rng = np.random.default_rng(seed)
    intrinsics = intrinsics_from_fov(width, height, fov_deg)
    if n_views == 1:
        azimuths = np.zeros(1)
    else:
        azimuths = np.linspace(-0.5, 0.5, n_views) * math.radians(azimuth_span_deg)
    cameras = []
    for i, azimuth in enumerate(azimuths):
        sign = 1.0 if i % 2 == 0 else -1.0
        elevation = math.radians(sign * elevation_deg + rng.uniform(-2.0, 2.0))
        eye = (
            radius * math.sin(azimuth) * math.cos(elevation),
            radius * math.sin(elevation),
            radius * math.cos(azimuth) * math.cos(elevation),
        )
        cameras.append(Camera(intrinsics.clone(), look_at(eye), width, height))
    return cameras


def camera_from_dict(
    entry: Dict[str, Any], intrinsics: Tensor, width: int, height: int, frame_id: str
) -> Camera:
    """Build a camera from a ``cameras.json`` frame entry."""
    try:
        pose = torch.tensor(entry["pose"], dtype=torch.float64)
        if pose.shape != (3, 4):
            raise ValueError(f"pose must be 3x4, got {tuple(pose.shape)}")
        if not bool(torch.isfinite(pose).all()):
            raise ValueError("pose contains non-finite values")
        return Camera(intrinsics, pose, width, height)
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetException(
            message=f"frame {frame_id}: invalid camera pose ({e})",
            user_message=f"Dataset frame {frame_id} has a corrupted pose entry.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
