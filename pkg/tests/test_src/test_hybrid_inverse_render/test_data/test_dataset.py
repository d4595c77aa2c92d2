"""Tests for capture dataset I/O and validation."""

import json
from pathlib import Path

import numpy as np
import pytest
import torch
from PIL import Image

from hybrid_inverse_render.data import (
    CAMERAS_FILENAME,
    CaptureDataset,
    Frame,
    Label,
    frame_name,
    load_dataset,
    read_label_png,
    save_dataset,
    stack_frames,
    write_label_png,
)
from hybrid_inverse_render.rendering import Camera, intrinsics_from_fov, look_at
from hybrid_inverse_render.utils import DatasetException, ValidationException


def test_raw_dataset_restores_exactly(dataset: CaptureDataset, tmp_path: Path) -> None:
    """Raw datasets keep images, labels, spec maps, poses and metadata."""
    save_dataset(dataset, tmp_path / "capture", image_format="raw")

    restored = load_dataset(tmp_path / "capture")

    assert restored.frame_ids == dataset.frame_ids
    assert restored.metadata == {"iso": "300", "fps": "30"}
    assert torch.equal(restored.intrinsics, dataset.intrinsics)
    for original, loaded in zip(dataset, restored):
        assert np.array_equal(loaded.image, original.image)
        assert np.array_equal(loaded.labels, original.labels)
        assert np.array_equal(loaded.pseudo_spec, original.pseudo_spec)
        assert loaded.albedo is not None and original.albedo is not None
        assert np.array_equal(loaded.albedo, original.albedo)
        assert torch.allclose(loaded.camera.pose, original.camera.pose)


def test_png_dataset_is_close(dataset: CaptureDataset, tmp_path: Path) -> None:
    """16-bit PNG datasets come back within quantisation error."""
    save_dataset(dataset, tmp_path, image_format="png")

    restored = load_dataset(tmp_path)

    assert (tmp_path / "frames" / "0000.png").is_file()
    for original, loaded in zip(dataset, restored):
        assert np.allclose(loaded.image, original.image, atol=1e-4)
        assert np.allclose(loaded.pseudo_spec, original.pseudo_spec, atol=1e-4)


def test_cameras_json_layout(dataset: CaptureDataset, tmp_path: Path) -> None:
    """cameras.json lists the shared camera model and one pose per frame."""
    save_dataset(dataset, tmp_path)

    description = json.loads((tmp_path / CAMERAS_FILENAME).read_text(encoding="utf-8"))

    assert (description["width"], description["height"]) == (5, 4)
    assert description["image_format"] == "raw"
    assert [frame["id"] for frame in description["frames"]] == ["0000", "0001", "0002"]
    assert np.array(description["frames"][1]["pose"]).shape == (3, 4)


def test_label_png_uses_palette(tmp_path: Path) -> None:
    """Labels are stored palette-indexed and read back as values."""
    labels = np.array([[0, 1], [2, 3]], dtype=np.uint8)
    write_label_png(tmp_path / "mask.png", labels)

    with Image.open(tmp_path / "mask.png") as image:
        assert image.mode == "P"
        assert image.convert("RGB").getpixel((1, 1)) == (90, 160, 255)
    assert np.array_equal(read_label_png(tmp_path / "mask.png", "0000"), labels)


def test_label_png_rejects_unknown_labels(tmp_path: Path) -> None:
    """Palette indices beyond the eye label are corruption."""
    image = Image.fromarray(np.full((2, 2), 7, dtype=np.uint8), mode="P")
    image.putpalette([0] * 768)
    image.save(tmp_path / "mask.png")

    with pytest.raises(DatasetException, match="unknown label"):
        read_label_png(tmp_path / "mask.png", "0000")


def test_label_png_rejects_rgb(tmp_path: Path) -> None:
    """Plain RGB masks are not accepted."""
    Image.new("RGB", (2, 2)).save(tmp_path / "mask.png")

    with pytest.raises(DatasetException, match="palette"):
        read_label_png(tmp_path / "mask.png", "0000")


def test_missing_cameras_file(tmp_path: Path) -> None:
    """A directory without cameras.json is not a dataset."""
    with pytest.raises(DatasetException, match="not found"):
        load_dataset(tmp_path)


@pytest.mark.parametrize(
    "content,match",
    [("{broken", "Invalid JSON"), (json.dumps({"width": 4, "height": 4}), "missing")],
)
def test_broken_cameras_file(tmp_path: Path, content: str, match: str) -> None:
    """Unreadable or incomplete descriptions are dataset errors."""
    (tmp_path / CAMERAS_FILENAME).write_text(content, encoding="utf-8")

    with pytest.raises(DatasetException, match=match):
        load_dataset(tmp_path)


def test_missing_frame_file(dataset: CaptureDataset, tmp_path: Path) -> None:
    """A missing mask names the frame."""
    save_dataset(dataset, tmp_path)
    (tmp_path / "masks" / "0001.png").unlink()

    with pytest.raises(DatasetException, match="frame 0001"):
        load_dataset(tmp_path)


def test_corrupted_pose(dataset: CaptureDataset, tmp_path: Path) -> None:
    """A pose that is not 3x4 names the frame."""
    save_dataset(dataset, tmp_path)
    cameras_file = tmp_path / CAMERAS_FILENAME
    description = json.loads(cameras_file.read_text(encoding="utf-8"))
    description["frames"][2]["pose"] = [[1.0, 0.0, 0.0]]
    cameras_file.write_text(json.dumps(description), encoding="utf-8")

    with pytest.raises(DatasetException, match="frame 0002"):
        load_dataset(tmp_path)


def test_unknown_image_format(dataset: CaptureDataset, tmp_path: Path) -> None:
    """Only raw and png images can be written."""
    with pytest.raises(ValidationException):
        save_dataset(dataset, tmp_path, image_format="exr")


def test_split(dataset: CaptureDataset) -> None:
    """Every n-th frame is held out; 0 keeps all frames for training."""
    assert dataset.split(2) == ([0, 2], [1])
    assert dataset.split(3) == ([0, 1], [2])
    assert dataset.split(0) == ([0, 1, 2], [])


def test_index_of(dataset: CaptureDataset) -> None:
    """Frame ids map to positions; unknown ids are dataset errors."""
    assert dataset.index_of("0002") == 2
    with pytest.raises(DatasetException):
        dataset.index_of("0042")


def test_foreground_box(dataset: CaptureDataset) -> None:
    """The box bounds every labelled pixel, end-exclusive."""
    assert dataset.frames[0].foreground_box() == (0, 0, 3, 4)


def test_foreground_box_without_labels(dataset: CaptureDataset) -> None:
    """Frames without labels use the whole image."""
    frame = dataset.frames[0]
    frame.labels = np.zeros_like(frame.labels)

    assert frame.foreground_box() == (0, 0, 4, 5)


def test_mismatched_intrinsics(dataset: CaptureDataset) -> None:
    """All frames must share one intrinsic matrix and image size."""
    odd = dataset.frames[1]
    odd.camera = Camera(intrinsics_from_fov(5, 4, 60.0), look_at((0.0, 0.0, 3.0)), 5, 4)

    with pytest.raises(ValidationException, match="frame 0001"):
        CaptureDataset(dataset.frames)


def test_mismatched_planes(dataset: CaptureDataset) -> None:
    """Image, labels and spec must match the camera size."""
    frame: Frame = dataset.frames[0]
    frame.pseudo_spec = np.zeros((2, 2), dtype=np.float32)

    with pytest.raises(ValidationException):
        CaptureDataset([frame])


def test_empty_dataset() -> None:
    """A dataset needs frames."""
    with pytest.raises(ValidationException):
        CaptureDataset([])


def test_stack_frames(dataset: CaptureDataset) -> None:
    """Stacked tensors lead with the frame axis."""
    stacked = stack_frames(dataset.frames)

    assert stacked["image"].shape == (3, 4, 5, 3)
    assert stacked["labels"].dtype == torch.int64
    assert int(stacked["labels"][0, 1, 2]) == int(Label.EYE)
    assert stacked["pseudo_spec"].shape == (3, 4, 5)


def test_frame_name() -> None:
    """Frame ids are zero-padded to four digits."""
    assert frame_name(7) == "0007"
    assert frame_name(12345) == "12345"
