"""
The export chain: extract, cull, keep the largest component, atlas and bake.
"""

from typing import Sequence

from hybrid_inverse_render.export.atlas import ExportedAssets, atlas_and_bake
from hybrid_inverse_render.export.config import ExportConfig
from hybrid_inverse_render.export.mesh import cull_unseen, largest_component, marching_cubes
from hybrid_inverse_render.rendering import Camera, HybridScene


def export_scene(
    scene: HybridScene, cameras: Sequence[Camera], config: ExportConfig
) -> ExportedAssets:
    """Assets of ``scene`` restricted to the surface the training ``cameras`` saw."""
    mesh = marching_cubes(scene, config.resolution, config.iso)
    mesh = cull_unseen(mesh, cameras, scene, config)
    mesh = largest_component(mesh)
    return atlas_and_bake(mesh, scene, config)
