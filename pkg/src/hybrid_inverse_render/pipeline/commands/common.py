"""
Helpers shared by the subcommands: building the fitted light, reading fitted
scenes, standalone camera files and frame lookups.
"""

import json
from pathlib import Path
from typing import List, Optional, Sequence

import torch

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.data import CaptureDataset, load_dataset
from hybrid_inverse_render.pipeline.loader import RunConfig
from hybrid_inverse_render.rendering import Camera, camera_from_dict
from hybrid_inverse_render.training import FitResult, load_fit_state
from hybrid_inverse_render.utils import DatasetException, ErrorSeverity, SystemException


def build_light(config: RunConfig, view_ids: Optional[Sequence[str]] = None) -> CombinedLight:
    """Light initialised from the ``light`` section; occlusion rows only when enabled."""
    settings = config.light
    return CombinedLight(
        flash_scale=settings.flash_scale,
        flash_color=settings.flash_color,
        ambient_enabled=settings.ambient_enabled,
        k00_init=settings.k00_init,
        view_ids=list(view_ids) if settings.occlusion_masks and view_ids is not None else None,
        learn_flash_scale=settings.learn_flash_scale,
        dtype=config.scene.torch_dtype(),
    )


def read_fitted(path: str, config: RunConfig) -> FitResult:
    """Fitted scene, light and k from a ``fit`` output (its root or its ``scene`` folder)."""
    directory = Path(path)
    if not directory.is_dir():
        raise DatasetException(
            message=f"Fitted scene directory not found: {directory}",
            user_message=f"{directory} is not a fitted scene directory.",
            severity=ErrorSeverity.ERROR,
        )
    if (directory / "scene").is_dir():
        directory = directory / "scene"
    return load_fit_state(directory, dtype=config.scene.torch_dtype())


def read_dataset(path: str) -> CaptureDataset:
    """Dataset at ``path``."""
    return load_dataset(Path(path))


def frame_index(dataset: CaptureDataset, frame: Optional[str]) -> int:
    """Index of a frame given by id ("0003") or position ("3"); the first frame if None."""
    if frame is None:
        return 0
    if frame in dataset.frame_ids:
        return dataset.index_of(frame)
    if frame.isdigit() and int(frame) < len(dataset):
        return int(frame)
    return dataset.index_of(frame)


def read_camera_file(path: str) -> Camera:
    """Camera from ``{"intrinsics": 3x3, "width": W, "height": H, "pose": 3x4}``."""
    source = Path(path)
    try:
        entry = json.loads(source.read_text(encoding="utf-8"))
        intrinsics = torch.tensor(entry["intrinsics"], dtype=torch.float64)
        width, height = int(entry["width"]), int(entry["height"])
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"Camera file not found: {source}",
            user_message=f"The camera file {source} does not exist.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DatasetException(
            message=f"Malformed camera file {source}: {e}",
            user_message=f"The camera file {source} needs intrinsics, width, height and pose.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return camera_from_dict(entry, intrinsics, width, height, source.stem)


def training_cameras(dataset: CaptureDataset, holdout_every: int) -> List[Camera]:
    """Cameras of the frames used for fitting."""
    train, _ = dataset.split(holdout_every)
    return [dataset.frames[i].camera for i in train]


def write_json(path: Path, payload: object) -> Path:
    """Write ``payload`` as indented JSON."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, default=float), encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return path
