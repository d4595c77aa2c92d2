"""
Mesh extraction and clean-up: marching cubes on the union SDF, removal of
triangles no training camera sees, and reduction to the largest connected
component.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mcubes
import numpy as np
import torch
import trimesh
from torch import Tensor

from hybrid_inverse_render.export.config import ExportConfig
from hybrid_inverse_render.rendering import Camera, HybridScene, RenderConfig, trace_depths
from hybrid_inverse_render.utils import LOGNAME_EXPORT, ErrorSeverity, ExportException, get_logger

logger = get_logger(LOGNAME_EXPORT)

SdfFunction = Callable[[Tensor], Tensor]


@dataclass
class TriangleMesh:
    """Vertices (V, 3) float64 and counter-clockwise triangles (T, 3) int64."""

    vertices: np.ndarray
    triangles: np.ndarray

    @property
    def vertex_count(self) -> int:
        """Number of vertices."""
        return int(self.vertices.shape[0])

    @property
    def triangle_count(self) -> int:
        """Number of triangles."""
        return int(self.triangles.shape[0])

    def centroids(self) -> np.ndarray:
        """Triangle centroids (T, 3)."""
        return self.vertices[self.triangles].mean(axis=1)

    def face_normals(self) -> np.ndarray:
        """Unit triangle normals (T, 3); degenerate triangles get zero."""
        corners = self.vertices[self.triangles]
        normals = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        return np.divide(normals, lengths, out=np.zeros_like(normals), where=lengths > 0.0)

    def submesh(self, keep: np.ndarray) -> "TriangleMesh":
        """Triangles selected by the boolean ``keep``, unused vertices dropped, order kept."""
        triangles = self.triangles[keep]
        used, inverse = np.unique(triangles.reshape(-1), return_inverse=True)
        return TriangleMesh(self.vertices[used], inverse.reshape(-1, 3).astype(np.int64))

    def to_trimesh(self) -> trimesh.Trimesh:
        """Unprocessed trimesh view."""
        return trimesh.Trimesh(self.vertices, self.triangles, process=False)


def lattice_coordinates(resolution: int) -> np.ndarray:
    """Coordinates of the lattice vertices along one axis, spanning [-1, 1]."""
    return np.linspace(-1.0, 1.0, resolution)


@torch.no_grad()
def sample_lattice(
    sdf: SdfFunction, resolution: int, chunk_size: int = 65536, dtype: torch.dtype = torch.float32
) -> np.ndarray:
    """SDF on the regular lattice, indexed [x, y, z]."""
    axis = torch.from_numpy(lattice_coordinates(resolution)).to(dtype)
    xs, ys, zs = torch.meshgrid(axis, axis, axis, indexing="ij")
    points = torch.stack([xs, ys, zs], dim=-1).reshape(-1, 3)
    values = torch.cat(
        [sdf(points[start : start + chunk_size]) for start in range(0, points.shape[0], chunk_size)]
    )
    return values.reshape(resolution, resolution, resolution).cpu().numpy().astype(np.float64)


def extract_isosurface(
    sdf: SdfFunction,
    resolution: int,
    iso: float,
    chunk_size: int = 65536,
    dtype: torch.dtype = torch.float32,
) -> TriangleMesh:
    """Marching cubes of ``sdf`` at ``iso`` with normals facing increasing SDF."""
    volume = sample_lattice(sdf, resolution, chunk_size, dtype)
    if not (volume.min() < iso < volume.max()):
        raise ExportException(
            message=(
                f"no surface at iso {iso:g}: lattice values span "
                f"[{volume.min():.4g}, {volume.max():.4g}]"
            ),
            user_message=f"No surface at iso {iso:g}; the scene is empty at this level.",
            severity=ErrorSeverity.ERROR,
        )
    vertices, triangles = mcubes.marching_cubes(volume, iso)
    vertices = vertices * (2.0 / (resolution - 1)) - 1.0
    mesh = TriangleMesh(vertices.astype(np.float64), triangles.astype(np.int64))
    if mesh.triangle_count == 0:
        raise ExportException(
            message=f"no surface at iso {iso:g}: marching cubes produced no triangles",
            severity=ErrorSeverity.ERROR,
        )
    return orient_outward(mesh, sdf, dtype)


@torch.no_grad()
def orient_outward(mesh: TriangleMesh, sdf: SdfFunction, dtype: torch.dtype) -> TriangleMesh:
    """Flip the winding when most face normals point into the surface."""
    centroids = mesh.centroids()
    normals = mesh.face_normals()
    offset = 1e-3
    outside = torch.from_numpy(centroids + offset * normals).to(dtype)
    inside = torch.from_numpy(centroids - offset * normals).to(dtype)
    agree = (sdf(outside) - sdf(inside)).cpu().numpy() > 0.0
    if agree.mean() >= 0.5:
        return mesh
    return TriangleMesh(mesh.vertices, mesh.triangles[:, ::-1].copy())


def marching_cubes(scene: HybridScene, grid_resolution: int, iso: float = 0.001) -> TriangleMesh:
    """Raw mesh of the union SDF (grid and eyeballs) at ``iso``."""
    if grid_resolution < 32:
        raise ExportException(
            message=f"marching cubes needs at least a 32^3 lattice, got {grid_resolution}",
            severity=ErrorSeverity.ERROR,
        )
    mesh = extract_isosurface(scene.sdf, grid_resolution, iso, dtype=scene.dtype)
    logger.info(
        "Extracted %d vertices, %d triangles at iso %g",
        mesh.vertex_count,
        mesh.triangle_count,
        iso,
    )
    return mesh


@torch.no_grad()
def visible_triangles(
    mesh: TriangleMesh,
    cameras: Sequence[Camera],
    sdf: SdfFunction,
    config: Optional[RenderConfig] = None,
    tolerance: float = 1e-2,
    dtype: torch.dtype = torch.float32,
) -> np.ndarray:
    """Boolean mask of triangles seen unoccluded and front-facing by at least one camera."""
    config = config or RenderConfig(near=0.0, far=10.0)
    centroids = torch.from_numpy(mesh.centroids()).to(dtype)
    normals = torch.from_numpy(mesh.face_normals()).to(dtype)
    seen = torch.zeros(mesh.triangle_count, dtype=torch.bool)
    for camera in cameras:
        origin = camera.origin.to(dtype)
        to_camera = origin[None, :] - centroids
        distance = to_camera.norm(dim=-1)
        candidates = ~seen & ((normals * to_camera).sum(dim=-1) > 0.0)
        candidates &= camera.in_frustum(centroids.to(torch.float64))
        index = candidates.nonzero()[:, 0]
        if index.numel() == 0:
            continue
        directions = -to_camera[index] / distance[index, None]
        origins = origin.expand(index.numel(), 3)
        depth, found = trace_depths(origins, directions, sdf, config)
        reaches = ~found | (depth >= distance[index] - tolerance)
        seen[index[reaches]] = True
    return seen.cpu().numpy()


def cull_unseen(
    mesh: TriangleMesh,
    cameras: Sequence[Camera],
    scene: HybridScene,
    config: Optional[ExportConfig] = None,
) -> TriangleMesh:
    """Drop triangles that no camera sees front-facing without an earlier surface crossing."""
    config = config or ExportConfig()
    tolerance = config.visibility_tolerance or 4.0 / (config.resolution - 1)
    keep = visible_triangles(mesh, cameras, scene.sdf, tolerance=tolerance, dtype=scene.dtype)
    logger.info("Culled %d of %d unseen triangles", int((~keep).sum()), mesh.triangle_count)
    return mesh.submesh(keep)


def largest_component(mesh: TriangleMesh) -> TriangleMesh:
    """The connected component (shared edges) with the most triangles.

    Ties go to the component containing the lowest vertex index.
    """
    if mesh.triangle_count == 0:
        raise ExportException(
            message="no triangles left after culling",
            user_message="Every triangle was culled; no camera sees the surface.",
            severity=ErrorSeverity.ERROR,
        )
    components = trimesh.graph.connected_components(
        mesh.to_trimesh().face_adjacency, nodes=np.arange(mesh.triangle_count)
    )
    best = min(
        components,
        key=lambda faces: (-len(faces), int(mesh.triangles[faces].min())),
    )
    keep = np.zeros(mesh.triangle_count, dtype=bool)
    keep[best] = True
    if len(components) > 1:
        logger.info("Keeping the largest of %d components", len(components))
    return mesh.submesh(keep)
