"""
Volume rendering of the hybrid scene.

Rays are clipped to the [-1,1]^3 cube and to [near, far], sampled with k
stratified depths, and composited with

    T_j = exp(-sum_{i<j} sigma_i delta_i),   w_j = T_j (1 - exp(-sigma_j delta_j))

where delta_j = t_{j+1} - t_j and the last interval ends at the far bound.
Per-region opacities gate the weights by the region owning each sample, so
opacity_E + opacity_S = opacity. The background is black.
"""

from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Tuple

import torch
from torch import Tensor

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.appearance.lighting import ViewIndex
from hybrid_inverse_render.rendering.camera import Camera
from hybrid_inverse_render.rendering.config import RenderConfig
from hybrid_inverse_render.rendering.scene import HybridScene

# direction components smaller than this are treated as parallel to a slab
_PARALLEL_EPS = 1e-12


@dataclass
class RayRender:
    """Composited outputs for a batch of N rays.

    Per-sample tensors are None for surface renders.
    """

    rgb: Tensor
    opacity: Tensor
    opacity_E: Tensor
    opacity_S: Tensor
    depth: Tensor
    albedo: Tensor
    specular: Tensor
    roughness: Tensor
    normal: Tensor
    weights: Optional[Tensor] = None
    sample_points: Optional[Tensor] = None
    sample_gradients: Optional[Tensor] = None


@dataclass
class PixelRender:
    """One ray's render."""

    rgb: Tensor
    opacity: Tensor
    opacity_E: Tensor
    opacity_S: Tensor
    expected_depth: Tensor


@dataclass
class ImageRender:
    """Full-image buffers, each shaped (H, W) or (H, W, 3)."""

    rgb: Tensor
    opacity: Tensor
    opacity_E: Tensor
    opacity_S: Tensor
    depth: Tensor
    albedo: Tensor
    specular: Tensor
    roughness: Tensor
    normal: Tensor

    def buffers(self) -> Dict[str, Tensor]:
        """Every buffer keyed by name."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


def intersect_cube(origins: Tensor, directions: Tensor) -> Tuple[Tensor, Tensor, Tensor]:
    """Slab test against [-1,1]^3: entry depth, exit depth and hit flag per ray."""
    safe = torch.where(
        directions.abs() < _PARALLEL_EPS,
        torch.full_like(directions, _PARALLEL_EPS),
        directions,
    )
    t_lower = (-1.0 - origins) / safe
    t_upper = (1.0 - origins) / safe
    t_entry = torch.minimum(t_lower, t_upper).amax(dim=-1)
    t_exit = torch.maximum(t_lower, t_upper).amin(dim=-1)
    return t_entry, t_exit, t_exit > t_entry


def clip_rays(
    origins: Tensor, directions: Tensor, config: RenderConfig
) -> Tuple[Tensor, Tensor, Tensor]:
    """Cube interval intersected with [near, far]; misses get a dummy unit interval."""
    t_entry, t_exit, hit = intersect_cube(origins, directions)
    near = t_entry.clamp_min(config.near)
    far = t_exit.clamp_max(config.far)
    hit = hit & (far > near)
    near = torch.where(hit, near, torch.zeros_like(near))
    far = torch.where(hit, far, torch.ones_like(far))
    return near, far, hit


def stratified_depths(
    near: Tensor, far: Tensor, samples: int, generator: Optional[torch.Generator] = None
) -> Tensor:
    """k depths per ray, one per equal bin; jittered with ``generator``, else bin midpoints."""
    n_rays = near.shape[0]
    if generator is None:
        offsets = torch.full((n_rays, samples), 0.5, dtype=near.dtype)
    else:
        offsets = torch.rand((n_rays, samples), generator=generator, dtype=near.dtype)
    bins = torch.arange(samples, dtype=near.dtype)[None, :]
    return near[:, None] + (far - near)[:, None] * (bins + offsets) / samples


def interval_lengths(depths: Tensor, far: Tensor) -> Tensor:
    """delta_j = t_{j+1} - t_j with the last interval closed at ``far``."""
    return torch.cat([depths[:, 1:] - depths[:, :-1], (far[:, None] - depths[:, -1:])], dim=-1)


def volume_weights(sigma: Tensor, delta: Tensor) -> Tensor:
    """Compositing weights T_j (1 - exp(-sigma_j delta_j)), shape (N, k)."""
    optical_depth = sigma * delta
    alpha = -torch.expm1(-optical_depth)
    accumulated = torch.cumsum(optical_depth, dim=-1)
    exclusive = torch.cat([torch.zeros_like(accumulated[:, :1]), accumulated[:, :-1]], dim=-1)
    return torch.exp(-exclusive) * alpha


def composite(weights: Tensor, values: Tensor) -> Tensor:
    """Weighted sum over samples of per-sample values (N, k) or (N, k, C)."""
    if values.dim() == 3:
        return (weights[:, :, None] * values).sum(dim=1)
    return (weights * values).sum(dim=1)


def _per_sample_view_index(view_index: ViewIndex, samples: int) -> ViewIndex:
    if isinstance(view_index, Tensor) and view_index.dim() > 0:
        return view_index.repeat_interleave(samples)
    return view_index


def render_rays(
    origins: Tensor,
    directions: Tensor,
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    view_index: ViewIndex = None,
    generator: Optional[torch.Generator] = None,
) -> RayRender:
    """Volume render a batch of rays (the batched form of :func:`march_ray`).

    The flashlight sits at each ray origin. ``view_index`` selects the occlusion
    mask, one index for the batch or one per ray.
    """
    dtype = scene.dtype
    origins = origins.to(dtype)
    directions = directions.to(dtype)
    n_rays, samples = origins.shape[0], config.samples_per_ray

    near, far, hit = clip_rays(origins, directions, config)
    depths = stratified_depths(near, far, samples, generator)
    delta = interval_lengths(depths, far)
    points = origins[:, None, :] + depths[:, :, None] * directions[:, None, :]
    flat_points = points.reshape(-1, 3)

    record, material = scene.sample(flat_points)
    radiance = light.shade(
        flat_points,
        origins.repeat_interleave(samples, dim=0),
        record.normal,
        material.c,
        material.s,
        material.rho,
        _per_sample_view_index(view_index, samples),
    )

    sigma = scene.density(record.sdf).reshape(n_rays, samples)
    weights = volume_weights(sigma, delta) * hit[:, None].to(dtype)
    is_eye = record.is_eye.reshape(n_rays, samples).to(dtype)

    opacity = weights.sum(dim=1)
    opacity_E = (weights * is_eye).sum(dim=1)
    return RayRender(
        rgb=composite(weights, radiance.reshape(n_rays, samples, 3)),
        opacity=opacity,
        opacity_E=opacity_E,
        opacity_S=opacity - opacity_E,
        depth=composite(weights, depths),
        albedo=composite(weights, material.c.reshape(n_rays, samples, 3)),
        specular=composite(weights, material.s.reshape(n_rays, samples)),
        roughness=composite(weights, material.rho.reshape(n_rays, samples)),
        normal=composite(weights, record.normal.reshape(n_rays, samples, 3)),
        weights=weights,
        sample_points=flat_points,
        sample_gradients=record.gradient,
    )


def march_ray(
    origin: Tensor,
    direction: Tensor,
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    view_index: Optional[int] = None,
) -> PixelRender:
    """Render a single ray with bin-midpoint samples."""
    result = render_rays(origin[None, :], direction[None, :], scene, light, config, view_index)
    return PixelRender(
        rgb=result.rgb[0],
        opacity=result.opacity[0],
        opacity_E=result.opacity_E[0],
        opacity_S=result.opacity_S[0],
        expected_depth=result.depth[0],
    )


def assemble_image(chunks: List[RayRender], height: int, width: int) -> ImageRender:
    """Concatenate ray chunks in order and reshape them into image buffers."""

    def gather(name: str) -> Tensor:
        joined = torch.cat([getattr(chunk, name) for chunk in chunks], dim=0)
        return joined.reshape(height, width, *joined.shape[1:])

    return ImageRender(**{f.name: gather(f.name) for f in fields(ImageRender)})


@torch.no_grad()
def render_image(
    camera: Camera,
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    view_index: Optional[int] = None,
    jitter: bool = False,
) -> ImageRender:
    """Render every pixel of ``camera`` in fixed-size chunks, in pixel order.

    Bin midpoints are used unless ``jitter`` is set, in which case samples are
    drawn from a generator seeded with ``config.rng_seed``.
    """
    origins, directions = camera.generate_rays(scene.dtype)
    generator = torch.Generator().manual_seed(config.rng_seed) if jitter else None
    chunks = [
        render_rays(
            origins[start : start + config.chunk_size],
            directions[start : start + config.chunk_size],
            scene,
            light,
            config,
            view_index,
            generator,
        )
        for start in range(0, origins.shape[0], config.chunk_size)
    ]
    return assemble_image(chunks, camera.height, camera.width)
