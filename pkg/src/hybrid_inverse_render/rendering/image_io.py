"""
Image files: 16-bit sRGB PNGs, 8-bit PNGs and raw float dumps.

Raw dumps hold little-endian float32 values, row-major with channels
interleaved, after a 16-byte header (magic b"HIRF", width, height, channels as
u32). PNG pixel values are gamma-encoded with exponent 1/2.2 on write and
linearised with x^2.2 on read.
"""

import struct
from pathlib import Path
from typing import Union

import cv2
import numpy as np
from PIL import Image
from torch import Tensor

from hybrid_inverse_render.utils import (
    LOGNAME_RENDERING,
    DatasetException,
    ErrorSeverity,
    SystemException,
    get_logger,
)

GAMMA = 2.2
RAW_MAGIC = b"HIRF"
_RAW_HEADER = struct.Struct("<4sIII")

logger = get_logger(LOGNAME_RENDERING)

PathLike = Union[str, Path]
ImageLike = Union[np.ndarray, Tensor]


def to_numpy(image: ImageLike) -> np.ndarray:
    """Detached float32 copy of a tensor or array."""
    if isinstance(image, Tensor):
        image = image.detach().cpu().numpy()
    return np.asarray(image, dtype=np.float32)


def linearize(encoded: np.ndarray) -> np.ndarray:
    """Gamma-encoded values in [0, 1] to linear."""
    return np.power(np.clip(encoded, 0.0, 1.0), GAMMA)


def encode_gamma(linear: np.ndarray) -> np.ndarray:
    """Linear values to gamma-encoded values in [0, 1]."""
    return np.power(np.clip(linear, 0.0, 1.0), 1.0 / GAMMA)


def _write_failed(path: Path, error: Exception) -> SystemException:
    return SystemException(
        message=f"Failed to write image {path}: {error}",
        user_message=f"Unable to write {path}. Please check the output directory.",
        severity=ErrorSeverity.ERROR,
        original_error=error,
    )


def write_raw(path: PathLike, image: ImageLike) -> Path:
    """Write an (H, W) or (H, W, C) float image as a raw dump."""
    path = Path(path)
    array = to_numpy(image)
    if array.ndim == 2:
        array = array[:, :, None]
    height, width, channels = array.shape
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as f:
            f.write(_RAW_HEADER.pack(RAW_MAGIC, width, height, channels))
            f.write(array.astype("<f4").tobytes(order="C"))
    except OSError as e:
        raise _write_failed(path, e) from e
    return path


def read_raw(path: PathLike) -> np.ndarray:
    """Read a raw dump as float32 (H, W, C)."""
    path = Path(path)
    try:
        payload = path.read_bytes()
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"Raw image not found: {path}",
            user_message=f"The image file {path} does not exist.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    if len(payload) < _RAW_HEADER.size:
        raise DatasetException(message=f"{path}: raw image header truncated")
    magic, width, height, channels = _RAW_HEADER.unpack_from(payload)
    if magic != RAW_MAGIC:
        raise DatasetException(message=f"{path}: bad raw image magic {magic!r}")
    expected = width * height * channels * 4
    if len(payload) - _RAW_HEADER.size != expected:
        raise DatasetException(
            message=(
                f"{path}: raw image holds {len(payload) - _RAW_HEADER.size} data bytes, "
                f"header promises {expected}"
            )
        )
    data = np.frombuffer(payload, dtype="<f4", offset=_RAW_HEADER.size)
    return data.reshape(height, width, channels).astype(np.float32)


def write_png16(path: PathLike, linear: ImageLike, gamma_encode: bool = True) -> Path:
    """Write a linear RGB or grey image as a 16-bit PNG, gamma-encoded by default."""
    path = Path(path)
    array = to_numpy(linear)
    array = encode_gamma(array) if gamma_encode else np.clip(array, 0.0, 1.0)
    encoded = np.round(array * 65535.0).astype(np.uint16)
    if encoded.ndim == 3 and encoded.shape[2] == 1:
        encoded = encoded[:, :, 0]
    if encoded.ndim == 3 and encoded.shape[2] == 3:
        encoded = cv2.cvtColor(encoded, cv2.COLOR_RGB2BGR)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        written = cv2.imwrite(str(path), encoded)
    except (OSError, cv2.error) as e:
        raise _write_failed(path, e) from e
    if not written:
        raise _write_failed(path, OSError("encoder reported failure"))
    return path


def write_png8(path: PathLike, values: ImageLike, gamma_encode: bool = False) -> Path:
    """Write values in [0, 1] as an 8-bit PNG, optionally gamma-encoding them first."""
    path = Path(path)
    array = to_numpy(values)
    array = encode_gamma(array) if gamma_encode else np.clip(array, 0.0, 1.0)
    if array.ndim == 3 and array.shape[2] == 1:
        array = array[:, :, 0]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(np.round(array * 255.0).astype(np.uint8)).save(path)
    except OSError as e:
        raise _write_failed(path, e) from e
    return path


def read_png(path: PathLike, linear: bool = True) -> np.ndarray:
    """Read an 8- or 16-bit PNG as float32 (H, W, C), linearised unless ``linear`` is False."""
    path = Path(path)
    if not path.is_file():
        raise DatasetException(
            message=f"Image not found: {path}",
            user_message=f"The image file {path} does not exist.",
            severity=ErrorSeverity.ERROR,
        )
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DatasetException(message=f"{path}: not a readable PNG image")
    scale = 65535.0 if raw.dtype == np.uint16 else 255.0
    if raw.ndim == 2:
        raw = raw[:, :, None]
    elif raw.shape[2] == 4:
        raw = cv2.cvtColor(raw, cv2.COLOR_BGRA2RGB)
    elif raw.shape[2] == 3:
        raw = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB)
    values = raw.astype(np.float32) / scale
    return linearize(values).astype(np.float32) if linear else values


def write_image(path: PathLike, linear: ImageLike) -> Path:
    """Write by suffix: ``.raw`` dumps floats, ``.png`` writes a 16-bit sRGB PNG."""
    path = Path(path)
    if path.suffix == ".raw":
        return write_raw(path, linear)
    return write_png16(path, linear)


def read_image(path: PathLike) -> np.ndarray:
    """Read a linear image by suffix, (H, W, C) float32."""
    path = Path(path)
    if path.suffix == ".raw":
        return read_raw(path)
    return read_png(path, linear=True)
