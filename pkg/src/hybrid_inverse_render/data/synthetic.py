"""
Synthetic captures rendered from a known scene, the ground truth the fitter is
checked against.

The head is a polynomial smooth-min blend of spheres (cranium, jaw, nose) with
two protruding eyeball spheres. Materials are piecewise constant: skin, hair
above a height threshold (specular albedo 0), and eyes using the eye prior.
Frames are rendered with the same surface tracer and shading the fitter uses,
under a co-located flash of scale 8 plus a dim ambient term.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import torch
from pydantic import Field
from torch import Tensor

from hybrid_inverse_render.appearance import CombinedLight, EyePrior, Material
from hybrid_inverse_render.data.dataset import CaptureDataset, Frame, Label, frame_name
from hybrid_inverse_render.geometry import HybridGeometry, SphereEyeballs, select
from hybrid_inverse_render.rendering import (
    HybridScene,
    LaplaceDensity,
    RenderConfig,
    orbit_cameras,
    trace_surface,
)
from hybrid_inverse_render.utils import LOGNAME_DATASET, BaseConfigModel, get_logger

Vector3 = Tuple[float, float, float]

logger = get_logger(LOGNAME_DATASET)


class HeadPrimitive(BaseConfigModel):
    """One sphere of the blended head."""

    centre: Vector3
    radius: float = Field(gt=0.0)


DEFAULT_PRIMITIVES = (
    HeadPrimitive(centre=(0.0, 0.05, 0.0), radius=0.55),
    HeadPrimitive(centre=(0.0, -0.25, 0.1), radius=0.4),
    HeadPrimitive(centre=(0.0, -0.02, 0.5), radius=0.12),
)


class SyntheticConfig(BaseConfigModel):
    """Ground-truth scene and capture rig of the synthetic generator.

    Attributes:
        n_views (int): Number of frames (at least 4)
        width (int): Image width in pixels
        height (int): Image height in pixels
        orbit_radius (float): Camera distance from the origin
        fov_deg (float): Horizontal field of view
        azimuth_span_deg (float): Arc covered by the cameras in front of the face
        elevation_deg (float): Alternating camera elevation
        image_format (str): "raw" float dumps or "png" files
        blend_radius (float): Smooth-min blend radius between head primitives
        hair_height (float): Surface points above this y are hair
        primitives (List[HeadPrimitive]): Spheres forming the head
        skin_albedo, skin_specular, skin_roughness: Skin material
        hair_albedo, hair_roughness: Hair material (specular albedo is 0)
        eye_albedo: Diffuse albedo of the eyeballs
        flash_scale (float): Ground-truth s_L
        ambient_k00 (float): Ground-truth band-0 ambient coefficient, all channels
        occlusion_strength (float): Scale of random per-view occlusion coefficients, 0 disables
        metadata (Dict[str, str]): Capture settings recorded with the dataset
        seed (int): Seed for camera jitter and occlusion coefficients
    """

    n_views: int = Field(default=16, ge=4)
    width: int = Field(default=64, gt=0)
    height: int = Field(default=64, gt=0)
    orbit_radius: float = Field(default=2.6, gt=1.8)
    fov_deg: float = Field(default=40.0, gt=0.0, lt=180.0)
    azimuth_span_deg: float = Field(default=150.0, ge=0.0, le=360.0)
    elevation_deg: float = Field(default=10.0, ge=-80.0, le=80.0)
    image_format: str = Field(default="raw", pattern="^(raw|png)$")
    blend_radius: float = Field(default=0.125, gt=0.0)
    hair_height: float = 0.32
    primitives: List[HeadPrimitive] = Field(
        default_factory=lambda: list(DEFAULT_PRIMITIVES), min_length=1
    )
    skin_albedo: Vector3 = (0.78, 0.57, 0.47)
    skin_specular: float = Field(default=0.3, ge=0.0, le=1.0)
    skin_roughness: float = Field(default=0.45, ge=0.04, le=1.0)
    hair_albedo: Vector3 = (0.10, 0.07, 0.05)
    hair_roughness: float = Field(default=0.8, ge=0.04, le=1.0)
    eye_albedo: Vector3 = (0.85, 0.85, 0.82)
    flash_scale: float = Field(default=8.0, gt=0.0)
    ambient_k00: float = -4.0
    occlusion_strength: float = Field(default=0.0, ge=0.0)
    metadata: Dict[str, str] = Field(
        default_factory=lambda: {"iso": "300", "white_balance": "4900K", "fps": "30"}
    )
    seed: int = Field(default=0, ge=0)


def smooth_min(
    a: Tensor, grad_a: Tensor, b: Tensor, grad_b: Tensor, k: float
) -> Tuple[Tensor, Tensor]:
    """Polynomial smooth minimum of two SDFs and its exact gradient.

    h = clamp(0.5 + 0.5 (b - a) / k, 0, 1), d = mix(b, a, h) - k h (1 - h);
    the derivative with respect to h vanishes, so the gradient is the h-blend.
    """
    h = (0.5 + 0.5 * (b - a) / k).clamp(0.0, 1.0)
    value = b + h * (a - b) - k * h * (1.0 - h)
    gradient = h[:, None] * grad_a + (1.0 - h)[:, None] * grad_b
    return value, gradient


class SmoothMinHead:
    """Analytic "head" SDF made of blended spheres."""

    def __init__(self, primitives: List[HeadPrimitive], blend_radius: float) -> None:
        self.centres = [torch.tensor(p.centre, dtype=torch.float64) for p in primitives]
        self.radii = [p.radius for p in primitives]
        self.blend_radius = blend_radius

    def _sphere(self, points: Tensor, index: int) -> Tuple[Tensor, Tensor]:
        offset = points - self.centres[index].to(points.dtype)
        distance = offset.norm(dim=-1)
        safe = distance.clamp_min(torch.finfo(points.dtype).tiny)
        return distance - self.radii[index], offset / safe[:, None]

    def sdf_and_gradient(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Blended SDF (N,) and gradient (N, 3)."""
        value, gradient = self._sphere(points, 0)
        for index in range(1, len(self.radii)):
            other, other_gradient = self._sphere(points, index)
            value, gradient = smooth_min(
                value, gradient, other, other_gradient, self.blend_radius
            )
        return value, gradient

    def sdf(self, points: Tensor) -> Tensor:
        """Blended SDF only."""
        return self.sdf_and_gradient(points)[0]


class SyntheticMaterials:
    """Piecewise-constant ground-truth materials."""

    def __init__(self, config: SyntheticConfig, prior: EyePrior) -> None:
        self.config = config
        self.prior = prior

    def is_hair(self, points: Tensor) -> Tensor:
        """True for points above the hair line."""
        return points[:, 1] > self.config.hair_height

    def material(self, points: Tensor, sdf_E: Tensor, sdf_S: Tensor) -> Material:
        dtype = points.dtype
        hair = self.is_hair(points)
        skin_albedo = torch.tensor(self.config.skin_albedo, dtype=dtype)
        hair_albedo = torch.tensor(self.config.hair_albedo, dtype=dtype)
        c_S = torch.where(hair[:, None], hair_albedo, skin_albedo)
        s_S = torch.where(
            hair,
            torch.zeros_like(points[:, 0]),
            torch.full_like(points[:, 0], self.config.skin_specular),
        )
        rho_S = torch.where(
            hair,
            torch.full_like(points[:, 0], self.config.hair_roughness),
            torch.full_like(points[:, 0], self.config.skin_roughness),
        )
        c_E = torch.tensor(self.config.eye_albedo, dtype=dtype).expand_as(c_S)
        return Material(
            select(c_E, c_S, sdf_E, sdf_S),
            select(self.prior.s_E, s_S, sdf_E, sdf_S),
            select(self.prior.rho_E, rho_S, sdf_E, sdf_S),
        )


@dataclass
class SyntheticScene:
    """Known geometry, materials and light."""

    head: SmoothMinHead
    eyes: SphereEyeballs
    materials: SyntheticMaterials
    light: CombinedLight

    def as_hybrid_scene(self, dtype: torch.dtype = torch.float64) -> HybridScene:
        """The scene in renderable form."""
        return HybridScene(
            HybridGeometry(self.head, self.eyes), self.materials, LaplaceDensity(dtype=dtype)
        )


def build_synthetic_scene(
    config: SyntheticConfig,
    eyes: SphereEyeballs,
    prior: EyePrior,
    view_ids: Optional[List[str]] = None,
) -> SyntheticScene:
    """Ground-truth scene; occlusion coefficients are drawn when ``occlusion_strength`` > 0."""
    occluded = config.occlusion_strength > 0.0
    if occluded and view_ids is None:
        view_ids = [frame_name(i) for i in range(config.n_views)]
    light = CombinedLight(
        flash_scale=config.flash_scale,
        k00_init=config.ambient_k00,
        view_ids=view_ids if occluded else None,
        dtype=torch.float64,
    )
    if light.occlusion is not None:
        rng = np.random.default_rng(config.seed + 1)
        coefficients = rng.normal(0.0, config.occlusion_strength, size=light.occlusion.shape)
        coefficients[:, 0] += 2.0
        with torch.no_grad():
            light.occlusion.copy_(torch.from_numpy(coefficients))
    return SyntheticScene(
        head=SmoothMinHead(config.primitives, config.blend_radius),
        eyes=eyes,
        materials=SyntheticMaterials(config, prior),
        light=light,
    )


@torch.no_grad()
def generate_synthetic(
    scene: SyntheticScene,
    n_views: int,
    resolution: Tuple[int, int],
    seed: int,
    config: Optional[SyntheticConfig] = None,
    render_config: Optional[RenderConfig] = None,
) -> CaptureDataset:
    """Render ``n_views`` frames of ``scene`` at ``resolution`` (width, height).

    Labels come from the region and hair predicate at the surface hit; the
    pseudo specular map is the ground-truth specular albedo.
    """
    config = config or SyntheticConfig()
    render_config = render_config or RenderConfig(trace_step=1.0 / 128.0)
    width, height = resolution
    hybrid = scene.as_hybrid_scene(torch.float64)
    cameras = orbit_cameras(
        n_views,
        config.orbit_radius,
        width,
        height,
        config.fov_deg,
        config.azimuth_span_deg,
        config.elevation_deg,
        seed,
    )

    frames: List[Frame] = []
    for index, camera in enumerate(cameras):
        origins, directions = camera.generate_rays(torch.float64)
        surface = trace_surface(origins, directions, hybrid, render_config)
        _, material = hybrid.sample(surface.points)
        view_index = index if scene.light.occlusion_enabled else None
        radiance = scene.light.shade(
            surface.points,
            origins,
            surface.normal,
            material.c,
            material.s,
            material.rho,
            view_index,
        )
        coverage = surface.hit.to(torch.float64)

        labels = torch.full_like(surface.t, int(Label.BACKGROUND), dtype=torch.int64)
        labels = torch.where(surface.hit, int(Label.SKIN), labels)
        hair = surface.hit & ~surface.is_eye & scene.materials.is_hair(surface.points)
        labels = torch.where(hair, int(Label.HAIR), labels)
        labels = torch.where(surface.hit & surface.is_eye, int(Label.EYE), labels)

        frames.append(
            Frame(
                frame_id=frame_name(index),
                image=(radiance * coverage[:, None]).reshape(height, width, 3).float().numpy(),
                camera=camera,
                labels=labels.reshape(height, width).numpy().astype(np.uint8),
                pseudo_spec=(material.s * coverage).reshape(height, width).float().numpy(),
                albedo=(material.c * coverage[:, None]).reshape(height, width, 3).float().numpy(),
            )
        )
        logger.debug("Rendered synthetic frame %s (%d hits)", index, int(surface.hit.sum()))

    logger.info("Generated %d synthetic frames at %dx%d", n_views, width, height)
    return CaptureDataset(frames, dict(config.metadata))
