"""
Per-triangle texture atlas and map baking.

Every triangle owns one square cell of a regular grid over the texture. Inside
the cell, ``gutter`` texels are left free on each side and the triangle is laid
out as the lower-left half of the remaining square: corner 0 at the cell's
top-left, corner 1 to its right, corner 2 below. Texels whose centres fall in
a chart sample the scene at the matching surface point; all other texels copy
their nearest chart texel.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
import torch
from scipy import ndimage

from hybrid_inverse_render.export.config import ExportConfig
from hybrid_inverse_render.export.mesh import TriangleMesh
from hybrid_inverse_render.rendering import HybridScene
from hybrid_inverse_render.utils import LOGNAME_EXPORT, ErrorSeverity, ExportException, get_logger

logger = get_logger(LOGNAME_EXPORT)

MIN_CHART_TEXELS = 2
MAP_NAMES = ("normal", "diffuse", "specular", "roughness")


@dataclass
class AtlasLayout:
    """Placement of every triangle's chart.

    Attributes:
        texture_size: Width and height of the atlas in texels.
        cell: Edge of one grid cell in texels.
        columns: Cells per atlas row.
        gutter: Free texels on each side of a chart.
        uvs: Texture coordinates (3T, 2), corner k of triangle t at row 3t + k.
    """

    texture_size: int
    cell: int
    columns: int
    gutter: int
    uvs: np.ndarray

    @property
    def chart_size(self) -> int:
        """Edge of the square holding one chart, in texels."""
        return self.cell - 2 * self.gutter

    def uv_triangles(self) -> np.ndarray:
        """Indices into :attr:`uvs` for every triangle (T, 3)."""
        count = self.uvs.shape[0] // 3
        return np.arange(3 * count, dtype=np.int64).reshape(count, 3)


@dataclass
class ExportedAssets:
    """Mesh, per-corner UVs and the baked maps (each (S, S, C) float32 in [0, 1])."""

    mesh: TriangleMesh
    layout: AtlasLayout
    maps: Dict[str, np.ndarray] = field(default_factory=dict)
    coverage: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=bool))


def layout_atlas(triangle_count: int, texture_size: int, gutter: int = 2) -> AtlasLayout:
    """Grid layout with one cell per triangle; raises when the charts would be too small."""
    columns = max(1, math.ceil(math.sqrt(triangle_count)))
    cell = texture_size // columns
    if triangle_count == 0 or cell - 2 * gutter < MIN_CHART_TEXELS:
        needed = columns * (MIN_CHART_TEXELS + 2 * gutter)
        raise ExportException(
            message=(
                f"texture of {texture_size} texels cannot hold {triangle_count} triangles "
                f"with {gutter}-texel gutters (needs at least {needed})"
            ),
            user_message=f"Texture too small for {triangle_count} triangles; use {needed} or more.",
            severity=ErrorSeverity.ERROR,
        )
    index = np.arange(triangle_count)
    x0 = (index % columns) * cell + gutter
    y0 = (index // columns) * cell + gutter
    chart = cell - 2 * gutter
    corners = np.stack(
        [
            np.stack([x0, y0], axis=-1),
            np.stack([x0 + chart, y0], axis=-1),
            np.stack([x0, y0 + chart], axis=-1),
        ],
        axis=1,
    ).astype(np.float64)
    # OBJ texture space has v pointing up from the bottom image row
    uvs = np.empty_like(corners)
    uvs[..., 0] = corners[..., 0] / texture_size
    uvs[..., 1] = 1.0 - corners[..., 1] / texture_size
    return AtlasLayout(texture_size, cell, columns, gutter, uvs.reshape(-1, 2))


def chart_texels(layout: AtlasLayout, triangle_count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Triangle index per texel (-1 outside charts) and barycentric weights (S, S, 3)."""
    size = layout.texture_size
    centres = np.arange(size) + 0.5
    px, py = np.meshgrid(centres, centres, indexing="xy")
    col = (px // layout.cell).astype(np.int64)
    row = (py // layout.cell).astype(np.int64)
    triangle = row * layout.columns + col
    a = (px - col * layout.cell - layout.gutter) / layout.chart_size
    b = (py - row * layout.cell - layout.gutter) / layout.chart_size
    inside = (
        (col < layout.columns)
        & (triangle < triangle_count)
        & (a >= 0.0)
        & (b >= 0.0)
        & (a + b <= 1.0)
    )
    weights = np.stack([1.0 - a - b, a, b], axis=-1)
    return np.where(inside, triangle, -1), weights


def dilate(values: np.ndarray, coverage: np.ndarray) -> np.ndarray:
    """Copy every uncovered texel from its nearest covered texel."""
    if coverage.all() or not coverage.any():
        return values
    _, (rows, cols) = ndimage.distance_transform_edt(~coverage, return_indices=True)
    return values[rows, cols]


@torch.no_grad()
def bake_maps(
    mesh: TriangleMesh, scene: HybridScene, layout: AtlasLayout, chunk_size: int = 65536
) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """Sample normal, diffuse, specular and roughness at every chart texel."""
    size = layout.texture_size
    triangle, weights = chart_texels(layout, mesh.triangle_count)
    coverage = triangle >= 0
    rows, cols = np.nonzero(coverage)
    corners = mesh.vertices[mesh.triangles[triangle[rows, cols]]]
    points = np.einsum("nk,nkc->nc", weights[rows, cols], corners)

    maps = {
        "normal": np.zeros((size, size, 3), dtype=np.float32),
        "diffuse": np.zeros((size, size, 3), dtype=np.float32),
        "specular": np.zeros((size, size, 1), dtype=np.float32),
        "roughness": np.zeros((size, size, 1), dtype=np.float32),
    }
    tensor_points = torch.from_numpy(points).to(scene.dtype)
    for start in range(0, tensor_points.shape[0], chunk_size):
        stop = start + chunk_size
        record, material = scene.sample(tensor_points[start:stop])
        r, c = rows[start:stop], cols[start:stop]
        maps["normal"][r, c] = (0.5 * (record.normal + 1.0)).cpu().numpy()
        maps["diffuse"][r, c] = material.c.cpu().numpy()
        maps["specular"][r, c, 0] = material.s.cpu().numpy()
        maps["roughness"][r, c, 0] = material.rho.cpu().numpy()
    return {name: dilate(values, coverage) for name, values in maps.items()}, coverage


def atlas_and_bake(
    mesh: TriangleMesh, scene: HybridScene, config: ExportConfig
) -> ExportedAssets:
    """Lay out one chart per triangle and bake every map at ``config.texture_size``."""
    layout = layout_atlas(mesh.triangle_count, config.texture_size, config.gutter)
    maps, coverage = bake_maps(mesh, scene, layout, config.chunk_size)
    logger.info(
        "Baked %d charts into %dx%d maps (%d texel cells)",
        mesh.triangle_count,
        config.texture_size,
        config.texture_size,
        layout.cell,
    )
    return ExportedAssets(mesh, layout, maps, coverage)


def decode_normal_map(encoded: np.ndarray) -> np.ndarray:
    """Object-space normals from RGB = (n + 1) / 2, renormalised."""
    normals = 2.0 * np.asarray(encoded, np.float64) - 1.0
    lengths = np.linalg.norm(normals, axis=-1, keepdims=True)
    return np.divide(normals, lengths, out=np.zeros_like(normals), where=lengths > 0.0)
