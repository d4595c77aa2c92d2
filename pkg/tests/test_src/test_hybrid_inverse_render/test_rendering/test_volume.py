"""Tests for volume rendering of the hybrid scene."""

import pytest
import torch

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.rendering import (
    Camera,
    HybridScene,
    RenderConfig,
    clip_rays,
    intersect_cube,
    interval_lengths,
    march_ray,
    render_image,
    render_rays,
    stratified_depths,
    volume_weights,
)


def _rays(*rows: tuple) -> tuple:
    origins = torch.tensor([row[0] for row in rows], dtype=torch.float64)
    directions = torch.tensor([row[1] for row in rows], dtype=torch.float64)
    return origins, directions


def test_intersect_cube() -> None:
    """A ray along -z enters at z = 1 and leaves at z = -1; an offset ray misses."""
    origins, directions = _rays(
        ((0.0, 0.0, 3.0), (0.0, 0.0, -1.0)), ((0.0, 3.0, 3.0), (0.0, 0.0, -1.0))
    )

    t_entry, t_exit, hit = intersect_cube(origins, directions)

    assert hit.tolist() == [True, False]
    assert (t_entry[0].item(), t_exit[0].item()) == pytest.approx((2.0, 4.0))


def test_clip_rays_applies_near_and_far() -> None:
    """The cube interval is cut to [near, far]; misses get a dummy unit interval."""
    origins, directions = _rays(
        ((0.0, 0.0, 3.0), (0.0, 0.0, -1.0)), ((0.0, 3.0, 3.0), (0.0, 0.0, -1.0))
    )

    near, far, hit = clip_rays(origins, directions, RenderConfig(near=2.5, far=3.5))

    assert hit.tolist() == [True, False]
    assert near.tolist() == pytest.approx([2.5, 0.0])
    assert far.tolist() == pytest.approx([3.5, 1.0])


def test_stratified_depths() -> None:
    """Bin midpoints without a generator, one jittered sample per bin with one."""
    near = torch.tensor([0.0], dtype=torch.float64)
    far = torch.tensor([1.0], dtype=torch.float64)

    midpoints = stratified_depths(near, far, 4)
    jittered = stratified_depths(near, far, 4, torch.Generator().manual_seed(0))

    assert midpoints[0].tolist() == [0.125, 0.375, 0.625, 0.875]
    bins = torch.arange(4, dtype=torch.float64) / 4.0
    assert ((jittered[0] >= bins) & (jittered[0] < bins + 0.25)).all()


def test_interval_lengths_close_at_far() -> None:
    """The last interval ends at the far bound."""
    depths = torch.tensor([[0.125, 0.375, 0.625, 0.875]], dtype=torch.float64)

    delta = interval_lengths(depths, torch.tensor([1.0], dtype=torch.float64))

    assert delta[0].tolist() == [0.25, 0.25, 0.25, 0.125]


def test_volume_weights_telescope(generator: torch.Generator) -> None:
    """Weights sum to 1 - exp(-total optical depth)."""
    sigma = torch.rand(5, 16, generator=generator, dtype=torch.float64) * 10.0
    delta = torch.full((5, 16), 0.05, dtype=torch.float64)

    weights = volume_weights(sigma, delta)

    expected = 1.0 - torch.exp(-(sigma * delta).sum(dim=1))
    assert torch.allclose(weights.sum(dim=1), expected)
    assert (weights >= 0.0).all()


def test_front_ray_is_opaque(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig, front_ray: tuple
) -> None:
    """A ray through the sphere saturates near the sphere surface."""
    origins, directions = front_ray

    result = render_rays(origins, directions, scene, light, render_config)

    assert result.opacity[0].item() > 0.99
    assert result.depth[0].item() == pytest.approx(2.5, abs=0.05)
    assert (result.rgb[0] > 0.0).all()
    assert result.normal[0, 2].item() > 0.9


def test_region_opacities(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig
) -> None:
    """Region opacities split the total; a ray at an eye centre is owned by E."""
    origins, directions = _rays(
        ((-0.2, 0.1, 3.0), (0.0, 0.0, -1.0)),
        ((0.0, -0.3, 3.0), (0.0, 0.0, -1.0)),
        ((0.0, 3.0, 3.0), (0.0, 0.0, -1.0)),
    )

    result = render_rays(origins, directions, scene, light, render_config)

    assert torch.allclose(result.opacity_E + result.opacity_S, result.opacity)
    assert result.opacity_E[0].item() > 0.9
    assert result.opacity_S[1].item() > 0.9
    assert result.opacity[2].item() == 0.0
    assert result.rgb[2].abs().sum().item() == 0.0


def test_occlusion_view_index(
    scene: HybridScene, render_config: RenderConfig, front_ray: tuple
) -> None:
    """The view index picks the occlusion mask of that view."""
    light = CombinedLight(flash_scale=0.0, k00_init=1.0, view_ids=["a"], dtype=torch.float64)
    origins, directions = front_ray

    unmasked = render_rays(origins, directions, scene, light, render_config)
    masked = render_rays(origins, directions, scene, light, render_config, view_index=0)

    assert torch.allclose(masked.rgb, 0.5 * unmasked.rgb)


def test_gradients_reach_every_parameter_group(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig, front_ray: tuple
) -> None:
    """Colour losses reach the SDF grid, the reflectance grid, beta and the light."""
    origins, directions = front_ray

    render_rays(origins, directions, scene, light, render_config).rgb.sum().backward()

    assert any(p.grad is not None and p.grad.abs().sum() > 0 for p in scene.geometry_parameters())
    assert any(
        p.grad is not None and p.grad.abs().sum() > 0 for p in scene.appearance_parameters()
    )
    assert light.ambient.grad is not None


def test_march_ray_matches_batch(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig, front_ray: tuple
) -> None:
    """The single-ray form agrees with the batched renderer."""
    origins, directions = front_ray

    pixel = march_ray(origins[0], directions[0], scene, light, render_config)
    batch = render_rays(origins, directions, scene, light, render_config)

    assert torch.allclose(pixel.rgb, batch.rgb[0])
    assert pixel.expected_depth.item() == pytest.approx(batch.depth[0].item())


def test_render_image_is_chunk_independent(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig, camera: Camera
) -> None:
    """Chunk size changes nothing; buffers come out image-shaped."""
    small_chunks = render_image(camera, scene, light, render_config)
    one_chunk = render_image(
        camera, scene, light, render_config.model_copy(update={"chunk_size": 4096})
    )

    assert small_chunks.rgb.shape == (7, 9, 3)
    assert small_chunks.opacity.shape == (7, 9)
    for name, buffer in small_chunks.buffers().items():
        assert torch.allclose(buffer, one_chunk.buffers()[name], atol=1e-12), name
    # the centre pixel sees the sphere
    assert small_chunks.opacity[3, 4].item() > 0.99


def test_jittered_render_is_seeded(
    scene: HybridScene, light: CombinedLight, render_config: RenderConfig, camera: Camera
) -> None:
    """Jittered renders repeat for the same seed."""
    first = render_image(camera, scene, light, render_config, jitter=True)
    second = render_image(camera, scene, light, render_config, jitter=True)

    assert torch.equal(first.rgb, second.rgb)
