"""
Surface rendering by root finding on the union SDF.

Rays march from the cube entry with steps clamp(sdf, min_step, trace_step)
until the SDF changes sign, then bisect the bracketing interval. Tracing runs
without gradients; shading at the returned points is differentiable in the
materials and the light, which is what the surface-rendering stage optimises.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import torch
from torch import Tensor

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.appearance.lighting import ViewIndex
from hybrid_inverse_render.geometry import Region
from hybrid_inverse_render.rendering.camera import Camera
from hybrid_inverse_render.rendering.config import RenderConfig
from hybrid_inverse_render.rendering.scene import HybridScene
from hybrid_inverse_render.rendering.volume import (
    ImageRender,
    RayRender,
    assemble_image,
    clip_rays,
)

BISECTION_STEPS = 40

SdfFunction = Callable[[Tensor], Tensor]


@dataclass
class SurfaceHit:
    """First surface crossing of each ray; fields are meaningless where ``hit`` is False."""

    hit: Tensor
    t: Tensor
    points: Tensor
    normal: Tensor
    is_eye: Tensor

    @property
    def region(self) -> Tensor:
        """Region codes of the hit points."""
        return torch.where(self.is_eye, int(Region.E), int(Region.S))


@torch.no_grad()
def trace_depths(
    origins: Tensor, directions: Tensor, sdf: SdfFunction, config: RenderConfig
) -> Tuple[Tensor, Tensor]:
    """Depth of the first crossing and a hit flag per ray.

    A ray that starts inside the surface hits at its entry depth.
    """
    near, far, inside_cube = clip_rays(origins, directions, config)
    max_step = config.trace_step
    min_step = max(config.surface_eps, max_step / 16.0)

    t = near.clone()
    value = torch.ones_like(t)
    entering = inside_cube.nonzero()[:, 0]
    value[entering] = sdf(origins[entering] + t[entering, None] * directions[entering])
    found = inside_cube & (value <= 0.0)
    t_low = t.clone()
    t_high = t.clone()
    marching = inside_cube & ~found

    for _ in range(config.max_trace_steps):
        if not bool(marching.any()):
            break
        index = marching.nonzero()[:, 0]
        step = value[index].clamp(min_step, max_step)
        t_next = torch.minimum(t[index] + step, far[index])
        value_next = sdf(origins[index] + t_next[:, None] * directions[index])

        crossed = value_next <= 0.0
        crossed_index = index[crossed]
        t_low[crossed_index] = t[index][crossed]
        t_high[crossed_index] = t_next[crossed]
        found[crossed_index] = True

        t[index] = t_next
        value[index] = value_next
        exhausted = index[~crossed & (t_next >= far[index])]
        marching[crossed_index] = False
        marching[exhausted] = False

    bracket = found & (t_high > t_low)
    if bool(bracket.any()):
        index = bracket.nonzero()[:, 0]
        low, high = t_low[index], t_high[index]
        for _ in range(BISECTION_STEPS):
            middle = 0.5 * (low + high)
            outside = sdf(origins[index] + middle[:, None] * directions[index]) > 0.0
            low = torch.where(outside, middle, low)
            high = torch.where(outside, high, middle)
        t_high[index] = high

    return torch.where(found, t_high, far), found


@torch.no_grad()
def trace_surface(
    origins: Tensor, directions: Tensor, scene: HybridScene, config: RenderConfig
) -> SurfaceHit:
    """Batched surface trace of the union SDF with normals and regions at the hits."""
    origins = origins.to(scene.dtype)
    directions = directions.to(scene.dtype)
    t, hit = trace_depths(origins, directions, scene.sdf, config)
    points = origins + t[:, None] * directions
    record = scene.geometry.evaluate(points)
    return SurfaceHit(hit=hit, t=t, points=points, normal=record.normal, is_eye=record.is_eye)


def surface_trace(
    origin: Tensor,
    direction: Tensor,
    scene: HybridScene,
    eps: float = 1e-4,
    config: Optional[RenderConfig] = None,
) -> Optional[Tuple[Tensor, Tensor, Region]]:
    """(hit point, normal, region) of one ray's first crossing, or None on a miss."""
    config = (config or RenderConfig()).model_copy(update={"surface_eps": eps})
    result = trace_surface(origin[None, :], direction[None, :], scene, config)
    if not bool(result.hit[0]):
        return None
    return result.points[0], result.normal[0], Region(int(result.region[0]))


def render_surface(
    origins: Tensor,
    directions: Tensor,
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    view_index: ViewIndex = None,
) -> RayRender:
    """Shade the first surface crossing of each ray; misses are black and transparent."""
    dtype = scene.dtype
    origins = origins.to(dtype)
    directions = directions.to(dtype)
    surface = trace_surface(origins, directions, scene, config)
    points = surface.points.detach()
    record, material = scene.sample(points)
    radiance = light.shade(
        points, origins, record.normal, material.c, material.s, material.rho, view_index
    )
    coverage = surface.hit.to(dtype)
    eye = (surface.hit & record.is_eye).to(dtype)
    return RayRender(
        rgb=radiance * coverage[:, None],
        opacity=coverage,
        opacity_E=eye,
        opacity_S=coverage - eye,
        depth=surface.t * coverage,
        albedo=material.c * coverage[:, None],
        specular=material.s * coverage,
        roughness=material.rho * coverage,
        normal=record.normal * coverage[:, None],
    )


@torch.no_grad()
def render_surface_image(
    camera: Camera,
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    view_index: Optional[int] = None,
) -> ImageRender:
    """Surface-render every pixel of ``camera`` in fixed-size chunks."""
    origins, directions = camera.generate_rays(scene.dtype)
    chunks = [
        render_surface(
            origins[start : start + config.chunk_size],
            directions[start : start + config.chunk_size],
            scene,
            light,
            config,
            view_index,
        )
        for start in range(0, origins.shape[0], config.chunk_size)
    ]
    return assemble_image(chunks, camera.height, camera.width)
