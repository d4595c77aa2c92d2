"""
Subpackage for rendering: cameras, the SDF-to-density conversion, volume and
surface rendering of the hybrid scene, and image files.
"""

from hybrid_inverse_render.rendering.camera import (
    Camera,
    camera_from_dict,
    intrinsics_from_fov,
    look_at,
    orbit_cameras,
)
from hybrid_inverse_render.rendering.config import BETA_MIN, RenderConfig
from hybrid_inverse_render.rendering.density import LaplaceDensity, sdf_to_density
from hybrid_inverse_render.rendering.image_io import (
    GAMMA,
    RAW_MAGIC,
    encode_gamma,
    linearize,
    read_image,
    read_png,
    read_raw,
    to_numpy,
    write_image,
    write_png8,
    write_png16,
    write_raw,
)
from hybrid_inverse_render.rendering.scene import (
    FieldMaterials,
    HybridScene,
    MaterialSource,
    build_grid_scene,
    load_scene,
    save_scene,
    scene_to_dict,
)
from hybrid_inverse_render.rendering.surface import (
    SurfaceHit,
    render_surface,
    render_surface_image,
    surface_trace,
    trace_depths,
    trace_surface,
)
from hybrid_inverse_render.rendering.volume import (
    ImageRender,
    PixelRender,
    RayRender,
    assemble_image,
    clip_rays,
    composite,
    intersect_cube,
    interval_lengths,
    march_ray,
    render_image,
    render_rays,
    stratified_depths,
    volume_weights,
)

__all__ = [
    "Camera",
    "camera_from_dict",
    "intrinsics_from_fov",
    "look_at",
    "orbit_cameras",
    "BETA_MIN",
    "RenderConfig",
    "LaplaceDensity",
    "sdf_to_density",
    "GAMMA",
    "RAW_MAGIC",
    "encode_gamma",
    "linearize",
    "read_image",
    "read_png",
    "read_raw",
    "to_numpy",
    "write_image",
    "write_png8",
    "write_png16",
    "write_raw",
    "FieldMaterials",
    "HybridScene",
    "MaterialSource",
    "build_grid_scene",
    "load_scene",
    "save_scene",
    "scene_to_dict",
    "SurfaceHit",
    "render_surface",
    "render_surface_image",
    "surface_trace",
    "trace_depths",
    "trace_surface",
    "ImageRender",
    "PixelRender",
    "RayRender",
    "assemble_image",
    "clip_rays",
    "composite",
    "intersect_cube",
    "interval_lengths",
    "march_ray",
    "render_image",
    "render_rays",
    "stratified_depths",
    "volume_weights",
]
