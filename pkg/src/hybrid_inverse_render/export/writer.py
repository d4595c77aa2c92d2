"""
OBJ, MTL and PNG writing of exported assets, plus an OBJ reader for
round-trip checks.

Diffuse albedo is stored sRGB-encoded; normals (object space, RGB = (n + 1) / 2),
specular albedo and roughness are stored linearly. ``manifest.json`` lists
every map with its role and colour space.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from hybrid_inverse_render.export.atlas import MAP_NAMES, ExportedAssets
from hybrid_inverse_render.rendering import write_png8
from hybrid_inverse_render.utils import (
    LOGNAME_EXPORT,
    ErrorSeverity,
    ExportException,
    SystemException,
    get_logger,
)

logger = get_logger(LOGNAME_EXPORT)

PathLike = Union[str, Path]

MANIFEST_FILENAME = "manifest.json"
MATERIAL_NAME = "face"
COLOR_SPACES = {"normal": "linear", "diffuse": "srgb", "specular": "linear", "roughness": "linear"}
MTL_KEYS = {"diffuse": "map_Kd", "specular": "map_Ks", "roughness": "map_Pr", "normal": "norm"}


@dataclass
class ObjContents:
    """Geometry parsed back from an OBJ file; indices are zero-based."""

    vertices: np.ndarray
    uvs: np.ndarray
    triangles: np.ndarray
    uv_triangles: np.ndarray
    mtllib: str


def map_filename(name: str) -> str:
    """PNG file name of map ``name``."""
    return f"{name}.png"


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e


def mtl_text(stem: str) -> str:
    """Material file referencing the four maps."""
    lines = [
        f"# Material for {stem}.obj",
        "# norm holds an object-space normal map, RGB = (n + 1) / 2",
        f"newmtl {MATERIAL_NAME}",
        "Ka 0.000 0.000 0.000",
        "Kd 1.000 1.000 1.000",
        "Ks 1.000 1.000 1.000",
        "d 1.0",
        "illum 2",
    ]
    lines += [f"{MTL_KEYS[name]} {map_filename(name)}" for name in MAP_NAMES]
    return "\n".join(lines) + "\n"


def obj_text(assets: ExportedAssets, stem: str) -> str:
    """OBJ with one vt per triangle corner and 1-based v/vt faces."""
    mesh = assets.mesh
    uv_triangles = assets.layout.uv_triangles()
    lines: List[str] = [
        "# hybrid_inverse_render export",
        f"# vertices {mesh.vertex_count} triangles {mesh.triangle_count}",
        f"mtllib {stem}.mtl",
    ]
    lines += [f"v {x:.7f} {y:.7f} {z:.7f}" for x, y, z in mesh.vertices]
    lines += [f"vt {u:.7f} {v:.7f}" for u, v in assets.layout.uvs]
    lines.append(f"usemtl {MATERIAL_NAME}")
    for (a, b, c), (ta, tb, tc) in zip(mesh.triangles + 1, uv_triangles + 1):
        lines.append(f"f {a}/{ta} {b}/{tb} {c}/{tc}")
    return "\n".join(lines) + "\n"


def write_assets(assets: ExportedAssets, directory: PathLike, stem: str = "head") -> Path:
    """Write ``<stem>.obj``, ``<stem>.mtl``, the four PNG maps and the manifest.

    Returns:
        Path: The OBJ file.
    """
    directory = Path(directory)
    missing = [name for name in MAP_NAMES if name not in assets.maps]
    if missing:
        raise ExportException(
            message=f"assets are missing maps: {', '.join(missing)}",
            severity=ErrorSeverity.ERROR,
        )
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SystemException(
            message=f"Failed to create {directory}: {e}",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e

    obj_path = directory / f"{stem}.obj"
    _write_text(obj_path, obj_text(assets, stem))
    _write_text(directory / f"{stem}.mtl", mtl_text(stem))
    for name in MAP_NAMES:
        write_png8(
            directory / map_filename(name),
            assets.maps[name],
            gamma_encode=COLOR_SPACES[name] == "srgb",
        )
    manifest: Dict[str, object] = {
        "obj": obj_path.name,
        "mtl": f"{stem}.mtl",
        "texture_size": assets.layout.texture_size,
        "normal_space": "object",
        "maps": {
            name: {"file": map_filename(name), "color_space": COLOR_SPACES[name]}
            for name in MAP_NAMES
        },
    }
    _write_text(directory / MANIFEST_FILENAME, json.dumps(manifest, indent=2))
    logger.info("Wrote assets to %s", directory)
    return obj_path


def read_obj(path: PathLike) -> ObjContents:
    """Parse the subset of OBJ written by :func:`write_assets`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to read {path}: {e}",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    vertices: List[List[float]] = []
    uvs: List[List[float]] = []
    triangles: List[List[int]] = []
    uv_triangles: List[List[int]] = []
    mtllib = ""
    for number, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "v":
                vertices.append([float(p) for p in parts[1:4]])
            elif parts[0] == "vt":
                uvs.append([float(p) for p in parts[1:3]])
            elif parts[0] == "f":
                corners = [p.split("/") for p in parts[1:4]]
                triangles.append([int(c[0]) - 1 for c in corners])
                uv_triangles.append([int(c[1]) - 1 for c in corners])
            elif parts[0] == "mtllib":
                mtllib = parts[1]
        except (ValueError, IndexError) as e:
            raise ExportException(
                message=f"{path}:{number}: malformed OBJ line {line!r}",
                severity=ErrorSeverity.ERROR,
                original_error=e,
            ) from e
    return ObjContents(
        vertices=np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
        uvs=np.asarray(uvs, dtype=np.float64).reshape(-1, 2),
        triangles=np.asarray(triangles, dtype=np.int64).reshape(-1, 3),
        uv_triangles=np.asarray(uv_triangles, dtype=np.int64).reshape(-1, 3),
        mtllib=mtllib,
    )
