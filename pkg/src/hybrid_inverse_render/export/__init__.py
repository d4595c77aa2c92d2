"""
Subpackage for asset export: marching cubes, visibility culling, the largest
component, per-triangle atlas baking and OBJ/MTL/PNG files.
"""

from hybrid_inverse_render.export.atlas import (
    MAP_NAMES,
    AtlasLayout,
    ExportedAssets,
    atlas_and_bake,
    bake_maps,
    chart_texels,
    decode_normal_map,
    dilate,
    layout_atlas,
)
from hybrid_inverse_render.export.chain import export_scene
from hybrid_inverse_render.export.config import DEFAULT_ISO, ExportConfig
from hybrid_inverse_render.export.mesh import (
    TriangleMesh,
    cull_unseen,
    extract_isosurface,
    largest_component,
    marching_cubes,
    sample_lattice,
    visible_triangles,
)
from hybrid_inverse_render.export.writer import (
    MANIFEST_FILENAME,
    ObjContents,
    map_filename,
    read_obj,
    write_assets,
)

__all__ = [
    "MAP_NAMES",
    "AtlasLayout",
    "ExportedAssets",
    "atlas_and_bake",
    "bake_maps",
    "chart_texels",
    "decode_normal_map",
    "dilate",
    "layout_atlas",
    "export_scene",
    "DEFAULT_ISO",
    "ExportConfig",
    "TriangleMesh",
    "cull_unseen",
    "extract_isosurface",
    "largest_component",
    "marching_cubes",
    "sample_lattice",
    "visible_triangles",
    "MANIFEST_FILENAME",
    "ObjContents",
    "map_filename",
    "read_obj",
    "write_assets",
]
