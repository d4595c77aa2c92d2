"""
Subpackage holding the hybrid geometry: grid SDF, eyeball spheres, their union
and the grid snapshot format.
"""

from hybrid_inverse_render.geometry.eyeballs import SphereEyeballs, sphere_sdf
from hybrid_inverse_render.geometry.grid import (
    DEFAULT_RESOLUTIONS,
    DenseGrid,
    SdfGridField,
    init_sphere,
    sphere_initialised_grid,
    vertex_positions,
)
from hybrid_inverse_render.geometry.hybrid import (
    HybridGeometry,
    Region,
    SamplePoints,
    SdfField,
    UnionSdf,
    normal,
    normalize_or_fallback,
    select,
    union_sdf,
)
from hybrid_inverse_render.geometry.snapshot import (
    REFLECTANCE_GRID_MAGIC,
    SDF_GRID_MAGIC,
    decode_grid,
    encode_grid,
    load_grid_into,
    read_grid_file,
    save_grid,
)

__all__ = [
    "DEFAULT_RESOLUTIONS",
    "DenseGrid",
    "SdfGridField",
    "init_sphere",
    "sphere_initialised_grid",
    "vertex_positions",
    "SphereEyeballs",
    "sphere_sdf",
    "HybridGeometry",
    "Region",
    "SamplePoints",
    "SdfField",
    "UnionSdf",
    "normal",
    "normalize_or_fallback",
    "select",
    "union_sdf",
    "REFLECTANCE_GRID_MAGIC",
    "SDF_GRID_MAGIC",
    "decode_grid",
    "encode_grid",
    "load_grid_into",
    "read_grid_file",
    "save_grid",
]
