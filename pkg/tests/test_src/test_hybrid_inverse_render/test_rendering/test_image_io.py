"""Tests for image files."""

from pathlib import Path

import numpy as np
import pytest
import torch

from hybrid_inverse_render.rendering import (
    RAW_MAGIC,
    encode_gamma,
    linearize,
    read_image,
    read_png,
    read_raw,
    write_image,
    write_png8,
    write_png16,
    write_raw,
)
from hybrid_inverse_render.utils import DatasetException


@pytest.fixture
def linear_rgb() -> np.ndarray:
    """Seeded linear RGB image."""
    return np.random.default_rng(7).uniform(0.0, 1.0, (4, 5, 3)).astype(np.float32)


def test_png16_keeps_linear_values(tmp_path: Path, linear_rgb: np.ndarray) -> None:
    """16-bit sRGB files read back to the linear values in RGB order."""
    path = write_png16(tmp_path / "image.png", linear_rgb)

    restored = read_png(path)

    assert restored.shape == (4, 5, 3)
    assert np.allclose(restored, linear_rgb, atol=1e-4)


def test_png16_grey(tmp_path: Path) -> None:
    """Single-channel images keep one channel."""
    grey = np.linspace(0.0, 1.0, 20, dtype=np.float32).reshape(4, 5)

    restored = read_png(write_png16(tmp_path / "grey.png", grey, gamma_encode=False), linear=False)

    assert restored.shape == (4, 5, 1)
    assert np.allclose(restored[:, :, 0], grey, atol=1e-4)


def test_png8_from_tensor(tmp_path: Path) -> None:
    """Tensors are accepted and values are stored with 8-bit precision."""
    values = torch.tensor([[0.0, 0.5], [0.25, 1.0]])

    restored = read_png(write_png8(tmp_path / "mask.png", values), linear=False)

    assert np.allclose(restored[:, :, 0], np.round(values.numpy() * 255.0) / 255.0)


def test_raw_is_exact(tmp_path: Path, linear_rgb: np.ndarray) -> None:
    """Raw dumps keep float32 values bit for bit, after the HIRF header."""
    path = write_raw(tmp_path / "image.raw", linear_rgb * 10.0)

    assert path.read_bytes()[:4] == RAW_MAGIC
    assert np.array_equal(read_raw(path), linear_rgb * 10.0)


def test_image_format_by_suffix(tmp_path: Path, linear_rgb: np.ndarray) -> None:
    """write_image and read_image choose the format from the suffix."""
    raw = read_image(write_image(tmp_path / "a.raw", linear_rgb))
    png = read_image(write_image(tmp_path / "a.png", linear_rgb))

    assert np.array_equal(raw, linear_rgb)
    assert np.allclose(png, linear_rgb, atol=1e-4)


@pytest.mark.parametrize(
    "payload,match",
    [
        (b"HIRF", "truncated"),
        (b"NOPE" + bytes(12), "magic"),
        (RAW_MAGIC + np.array([2, 2, 1], dtype="<u4").tobytes() + bytes(4), "header promises"),
    ],
)
def test_corrupt_raw(tmp_path: Path, payload: bytes, match: str) -> None:
    """Broken raw dumps are dataset errors."""
    path = tmp_path / "broken.raw"
    path.write_bytes(payload)

    with pytest.raises(DatasetException, match=match):
        read_raw(path)


def test_missing_images(tmp_path: Path) -> None:
    """Missing files are dataset errors."""
    with pytest.raises(DatasetException):
        read_png(tmp_path / "absent.png")
    with pytest.raises(DatasetException):
        read_raw(tmp_path / "absent.raw")


def test_gamma_helpers_invert() -> None:
    """Gamma encoding and linearisation are inverse on [0, 1] and clip outside."""
    values = np.array([0.0, 0.2, 0.7, 1.0, 1.5], dtype=np.float64)

    assert np.allclose(linearize(encode_gamma(values)), np.clip(values, 0.0, 1.0))
