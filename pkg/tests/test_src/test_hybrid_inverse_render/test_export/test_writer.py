"""Tests for OBJ/MTL/PNG writing and reading back."""

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from hybrid_inverse_render.export import (
    MANIFEST_FILENAME,
    MAP_NAMES,
    ExportedAssets,
    TriangleMesh,
    layout_atlas,
    map_filename,
    read_obj,
    write_assets,
)
from hybrid_inverse_render.utils import ExportException, SystemException


@pytest.fixture
def assets() -> ExportedAssets:
    """Two triangles with constant 8x8 maps."""
    mesh = TriangleMesh(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]),
        np.array([[0, 1, 2], [1, 3, 2]], dtype=np.int64),
    )
    maps = {
        "normal": np.tile(np.array([0.5, 0.5, 1.0], np.float32), (8, 8, 1)),
        "diffuse": np.full((8, 8, 3), 0.5, np.float32),
        "specular": np.full((8, 8, 1), 0.2, np.float32),
        "roughness": np.full((8, 8, 1), 0.6, np.float32),
    }
    return ExportedAssets(mesh, layout_atlas(2, 8, gutter=1), maps)


def test_obj_round_trip(assets: ExportedAssets, tmp_path: Path) -> None:
    """Positions, corner uvs and both index lists survive."""
    obj_path = write_assets(assets, tmp_path / "out")

    contents = read_obj(obj_path)

    assert obj_path.name == "head.obj"
    assert contents.mtllib == "head.mtl"
    assert np.allclose(contents.vertices, assets.mesh.vertices)
    assert np.allclose(contents.uvs, assets.layout.uvs, atol=1e-6)
    assert contents.triangles.tolist() == assets.mesh.triangles.tolist()
    assert contents.uv_triangles.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_mtl_and_manifest(assets: ExportedAssets, tmp_path: Path) -> None:
    """The material names every map; the manifest records colour spaces."""
    write_assets(assets, tmp_path, stem="face")

    mtl = (tmp_path / "face.mtl").read_text(encoding="utf-8")
    assert "map_Kd diffuse.png" in mtl
    assert "norm normal.png" in mtl
    manifest = json.loads((tmp_path / MANIFEST_FILENAME).read_text(encoding="utf-8"))
    assert manifest["obj"] == "face.obj"
    assert manifest["maps"]["diffuse"]["color_space"] == "srgb"
    assert manifest["maps"]["roughness"]["color_space"] == "linear"


def test_map_encodings(assets: ExportedAssets, tmp_path: Path) -> None:
    """Diffuse is gamma-encoded, the scalar maps are linear single channel."""
    write_assets(assets, tmp_path)

    for name in MAP_NAMES:
        assert (tmp_path / map_filename(name)).is_file()
    with Image.open(tmp_path / "roughness.png") as image:
        assert image.mode == "L"
        assert image.getpixel((0, 0)) == round(0.6 * 255)
    with Image.open(tmp_path / "diffuse.png") as image:
        assert image.getpixel((3, 3))[0] > 128
    with Image.open(tmp_path / "normal.png") as image:
        assert image.getpixel((0, 0)) == (128, 128, 255)


def test_missing_map(assets: ExportedAssets, tmp_path: Path) -> None:
    """All four maps are required."""
    del assets.maps["specular"]

    with pytest.raises(ExportException, match="specular"):
        write_assets(assets, tmp_path)


def test_read_malformed_obj(tmp_path: Path) -> None:
    """Broken lines are reported with their line number."""
    path = tmp_path / "broken.obj"
    path.write_text("v 0 0 0\nf 1/x 2/1 3/1\n", encoding="utf-8")

    with pytest.raises(ExportException, match="broken.obj:2"):
        read_obj(path)


def test_read_missing_obj(tmp_path: Path) -> None:
    """A missing file is a system error."""
    with pytest.raises(SystemException):
        read_obj(tmp_path / "absent.obj")
