"""
Binary snapshot container for dense grids.

Layout (all little-endian):

    magic        4 bytes   b"HIRG" (SDF grid) or b"HIRR" (reflectance grid)
    version      u32       currently 1
    level count  u32
    channels     u32
    per level    u32 nx, u32 ny, u32 nz, f32 level weight
    data         per level, float32 values in x-fastest order, channels
                 interleaved per vertex
"""

import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import torch

from hybrid_inverse_render.geometry.grid import DenseGrid
from hybrid_inverse_render.utils import (
    LOGNAME_GEOMETRY,
    DatasetException,
    ErrorSeverity,
    SystemException,
    get_logger,
)

SDF_GRID_MAGIC = b"HIRG"
REFLECTANCE_GRID_MAGIC = b"HIRR"
SNAPSHOT_VERSION = 1

_HEADER = struct.Struct("<4sIII")
_LEVEL = struct.Struct("<IIIf")

logger = get_logger(LOGNAME_GEOMETRY)

PathLike = Union[str, Path]


def encode_grid(grid: DenseGrid, magic: bytes) -> bytes:
    """Serialise ``grid`` into the snapshot byte layout."""
    parts: List[bytes] = [
        _HEADER.pack(magic, SNAPSHOT_VERSION, len(grid.resolutions), grid.channels)
    ]
    weights = grid.level_weights.detach().cpu().numpy()
    for res, weight in zip(grid.resolutions, weights):
        parts.append(_LEVEL.pack(res, res, res, float(weight)))
    for table in grid.values:
        parts.append(table.detach().cpu().numpy().astype("<f4").tobytes(order="C"))
    return b"".join(parts)


def decode_grid(
    payload: bytes, magic: bytes, source: str = "<bytes>"
) -> Tuple[List[int], List[float], int, List[np.ndarray]]:
    """Parse snapshot bytes into (resolutions, level weights, channels, level arrays)."""

    def corrupt(reason: str) -> DatasetException:
        return DatasetException(
            message=f"Corrupted grid snapshot {source}: {reason}",
            user_message=f"The grid snapshot {source} is corrupted or of the wrong kind.",
            severity=ErrorSeverity.ERROR,
        )

    if len(payload) < _HEADER.size:
        raise corrupt("file shorter than header")
    found_magic, version, level_count, channels = _HEADER.unpack_from(payload, 0)
    if found_magic != magic:
        raise corrupt(f"magic {found_magic!r}, expected {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise corrupt(f"unsupported version {version}")

    offset = _HEADER.size
    dims: List[Tuple[int, int, int]] = []
    weights: List[float] = []
    for _ in range(level_count):
        if offset + _LEVEL.size > len(payload):
            raise corrupt("truncated level table")
        nx, ny, nz, weight = _LEVEL.unpack_from(payload, offset)
        if not nx == ny == nz:
            raise corrupt(f"non-cubic level {nx}x{ny}x{nz}")
        dims.append((nx, ny, nz))
        weights.append(weight)
        offset += _LEVEL.size

    arrays: List[np.ndarray] = []
    for nx, ny, nz in dims:
        count = nx * ny * nz * channels
        end = offset + 4 * count
        if end > len(payload):
            raise corrupt("truncated value block")
        values = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        arrays.append(values.reshape(nz, ny, nx, channels).copy())
        offset = end
    if offset != len(payload):
        raise corrupt(f"{len(payload) - offset} trailing bytes")
    return [d[0] for d in dims], weights, channels, arrays


def save_grid(grid: DenseGrid, path: PathLike, magic: bytes) -> Path:
    """Write ``grid`` to ``path``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_grid(grid, magic))
    except OSError as e:
        raise SystemException(
            message=f"Failed to write grid snapshot {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    logger.info("Wrote %s snapshot %s", magic.decode(), path)
    return path


def read_grid_file(
    path: PathLike, magic: bytes
) -> Tuple[List[int], List[float], int, List[np.ndarray]]:
    """Read and parse a snapshot file."""
    path = Path(path)
    try:
        payload = path.read_bytes()
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"Grid snapshot not found: {path}",
            user_message=f"The grid snapshot {path} does not exist.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return decode_grid(payload, magic, source=str(path))


@torch.no_grad()
def load_grid_into(grid: DenseGrid, path: PathLike, magic: bytes) -> DenseGrid:
    """Fill an existing ``grid`` from a snapshot; the layout must match."""
    resolutions, weights, channels, arrays = read_grid_file(path, magic)
    if tuple(resolutions) != grid.resolutions or channels != grid.channels:
        raise DatasetException(
            message=(
                f"Snapshot {path} holds levels {resolutions} x {channels} channels, "
                f"grid expects {list(grid.resolutions)} x {grid.channels}"
            ),
            user_message="The snapshot does not match the configured grid resolutions.",
            severity=ErrorSeverity.ERROR,
        )
    for table, array in zip(grid.values, arrays):
        table.copy_(torch.from_numpy(array).to(table.dtype))
    grid.level_weights.copy_(torch.tensor(weights, dtype=grid.level_weights.dtype))
    return grid
