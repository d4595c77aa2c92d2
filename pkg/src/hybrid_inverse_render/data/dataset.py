"""
Capture datasets: posed linear images with region labels and pseudo specular maps.

On-disk layout::

    cameras.json        width, height, shared intrinsics, metadata, per-frame poses
    frames/NNNN.raw     linear RGB float dump (or NNNN.png, sRGB 16-bit)
    masks/NNNN.png      palette-indexed labels (0 background, 1 skin, 2 hair, 3 eye)
    spec/NNNN.raw       linear specular albedo (or NNNN.png, linear 16-bit grey)
    albedo/NNNN.raw     optional ground-truth diffuse albedo (synthetic captures)

``cameras.json``::

    {
      "width": 64, "height": 64,
      "intrinsics": [[fx, 0, cx], [0, fy, cy], [0, 0, 1]],
      "image_format": "raw",
      "metadata": {"iso": "300", "white_balance": "4900K", "fps": "30"},
      "frames": [{"id": "0000", "pose": [[r00, r01, r02, tx], ...]}, ...]
    }
"""

import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from PIL import Image
from torch import Tensor

from hybrid_inverse_render.rendering import (
    Camera,
    camera_from_dict,
    read_png,
    read_raw,
    write_png16,
    write_raw,
)
from hybrid_inverse_render.utils import (
    LOGNAME_DATASET,
    DatasetException,
    ErrorSeverity,
    SystemException,
    ValidationException,
    get_logger,
)

CAMERAS_FILENAME = "cameras.json"
FRAMES_DIR = "frames"
MASKS_DIR = "masks"
SPEC_DIR = "spec"
ALBEDO_DIR = "albedo"
IMAGE_FORMATS = ("raw", "png")

logger = get_logger(LOGNAME_DATASET)

PathLike = Union[str, Path]


class Label(IntEnum):
    """Per-pixel region labels."""

    BACKGROUND = 0
    SKIN = 1
    HAIR = 2
    EYE = 3


# RGB palette entries for the label PNGs, in label order
MASK_PALETTE = (0, 0, 0, 224, 172, 150, 96, 64, 40, 90, 160, 255)


@dataclass
class Frame:
    """One captured view.

    Attributes:
        frame_id: Zero-padded frame number, e.g. "0003".
        image: Linear RGB (H, W, 3) float32.
        camera: Pose and shared intrinsics; the flash sits at the camera centre.
        labels: (H, W) uint8 values of :class:`Label`.
        pseudo_spec: Pseudo specular albedo (H, W) float32.
        albedo: Ground-truth diffuse albedo (H, W, 3), synthetic captures only.
    """

    frame_id: str
    image: np.ndarray
    camera: Camera
    labels: np.ndarray
    pseudo_spec: np.ndarray
    albedo: Optional[np.ndarray] = None

    def foreground_box(self) -> Tuple[int, int, int, int]:
        """(row0, col0, row1, col1) bounding the labelled pixels, whole image if none."""
        rows, cols = np.nonzero(self.labels != Label.BACKGROUND)
        if rows.size == 0:
            return 0, 0, self.camera.height, self.camera.width
        return int(rows.min()), int(cols.min()), int(rows.max()) + 1, int(cols.max()) + 1


@dataclass
class CaptureDataset:
    """Frames sharing one set of intrinsics and one image size."""

    frames: List[Frame]
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValidationException(
                message="A capture dataset needs at least one frame",
                severity=ErrorSeverity.ERROR,
            )
        first = self.frames[0].camera
        for frame in self.frames:
            camera = frame.camera
            if (camera.width, camera.height) != (first.width, first.height) or not bool(
                torch.equal(camera.intrinsics, first.intrinsics)
            ):
                raise ValidationException(
                    message=f"frame {frame.frame_id}: intrinsics or size differ from frame 0",
                    user_message="All frames of a dataset must share one camera intrinsic matrix.",
                    severity=ErrorSeverity.ERROR,
                )
            expected = (camera.height, camera.width)
            if (
                frame.image.shape != (*expected, 3)
                or frame.labels.shape != expected
                or frame.pseudo_spec.shape != expected
            ):
                raise ValidationException(
                    message=(
                        f"frame {frame.frame_id}: image {frame.image.shape}, labels "
                        f"{frame.labels.shape} and spec {frame.pseudo_spec.shape} must match "
                        f"{expected}"
                    ),
                    severity=ErrorSeverity.ERROR,
                )

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    @property
    def width(self) -> int:
        """Image width shared by every frame."""
        return self.frames[0].camera.width

    @property
    def height(self) -> int:
        """Image height shared by every frame."""
        return self.frames[0].camera.height

    @property
    def intrinsics(self) -> Tensor:
        """Shared 3x3 intrinsics."""
        return self.frames[0].camera.intrinsics

    @property
    def frame_ids(self) -> List[str]:
        """Frame ids in order."""
        return [frame.frame_id for frame in self.frames]

    def index_of(self, frame_id: str) -> int:
        """Position of ``frame_id``."""
        try:
            return self.frame_ids.index(frame_id)
        except ValueError as e:
            raise DatasetException(
                message=f"frame {frame_id}: not part of the dataset",
                severity=ErrorSeverity.ERROR,
                original_error=e,
            ) from e

    def split(self, holdout_every: int) -> Tuple[List[int], List[int]]:
        """Training and held-out frame indices; every ``holdout_every``-th frame is held out.

        ``holdout_every`` of 0 keeps every frame for training.
        """
        indices = list(range(len(self.frames)))
        if holdout_every <= 0:
            return indices, []
        held_out = [i for i in indices if i % holdout_every == holdout_every - 1]
        training = [i for i in indices if i not in held_out]
        return training, held_out


def frame_name(index: int) -> str:
    """Zero-padded frame id."""
    return f"{index:04d}"


def _fail(frame_id: str, reason: str, error: Union[Exception, None] = None) -> DatasetException:
    return DatasetException(
        message=f"frame {frame_id}: {reason}",
        user_message=f"Dataset frame {frame_id} is missing files or is inconsistent ({reason}).",
        severity=ErrorSeverity.ERROR,
        original_error=error,
    )


def write_label_png(path: Path, labels: np.ndarray) -> None:
    """Write labels as a palette PNG."""
    height, width = labels.shape
    payload = np.ascontiguousarray(labels, dtype=np.uint8).tobytes()
    image = Image.frombytes("P", (width, height), payload)
    image.putpalette(list(MASK_PALETTE))
    image.save(path)


def read_label_png(path: Path, frame_id: str) -> np.ndarray:
    """Read a palette PNG back into label values."""
    if not path.is_file():
        raise _fail(frame_id, f"mask file {path} not found")
    with Image.open(path) as image:
        if image.mode != "P":
            raise _fail(frame_id, f"mask {path} is not palette-indexed (mode {image.mode})")
        labels = np.array(image, dtype=np.uint8)
    if int(labels.max(initial=0)) > max(Label):
        raise _fail(frame_id, f"mask {path} holds unknown label {int(labels.max())}")
    return labels


def save_dataset(dataset: CaptureDataset, path: PathLike, image_format: str = "raw") -> Path:
    """Write ``dataset`` in the canonical layout."""
    if image_format not in IMAGE_FORMATS:
        raise ValidationException(
            message=f"Unknown image format {image_format!r}, expected one of {IMAGE_FORMATS}",
            severity=ErrorSeverity.ERROR,
        )
    root = Path(path)
    try:
        for sub in (FRAMES_DIR, MASKS_DIR, SPEC_DIR):
            (root / sub).mkdir(parents=True, exist_ok=True)
        for frame in dataset:
            name = f"{frame.frame_id}.{image_format}"
            if image_format == "raw":
                write_raw(root / FRAMES_DIR / name, frame.image)
                write_raw(root / SPEC_DIR / name, frame.pseudo_spec)
            else:
                write_png16(root / FRAMES_DIR / name, frame.image)
                write_png16(root / SPEC_DIR / name, frame.pseudo_spec, gamma_encode=False)
            write_label_png(root / MASKS_DIR / f"{frame.frame_id}.png", frame.labels)
            if frame.albedo is not None:
                (root / ALBEDO_DIR).mkdir(exist_ok=True)
                if image_format == "raw":
                    write_raw(root / ALBEDO_DIR / name, frame.albedo)
                else:
                    write_png16(root / ALBEDO_DIR / name, frame.albedo, gamma_encode=False)

        description: Dict[str, Any] = {
            "width": dataset.width,
            "height": dataset.height,
            "intrinsics": dataset.intrinsics.tolist(),
            "image_format": image_format,
            "metadata": dict(dataset.metadata),
            "frames": [{"id": frame.frame_id, **frame.camera.to_dict()} for frame in dataset],
        }
        (root / CAMERAS_FILENAME).write_text(json.dumps(description, indent=2), encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write dataset to {root}: {e}",
            user_message=f"Unable to write the dataset into {root}.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    logger.info("Saved %d frames to %s (%s images)", len(dataset), root, image_format)
    return root


def _read_description(root: Path) -> Dict[str, Any]:
    cameras_file = root / CAMERAS_FILENAME
    try:
        description = json.loads(cameras_file.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"{cameras_file} not found",
            user_message=f"{root} is not a capture dataset (no {CAMERAS_FILENAME}).",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    except json.JSONDecodeError as e:
        raise DatasetException(
            message=f"Invalid JSON in {cameras_file}: {e}",
            user_message=f"{cameras_file} is not valid JSON.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    for key in ("width", "height", "intrinsics", "frames"):
        if key not in description:
            raise DatasetException(message=f"{cameras_file} is missing '{key}'")
    return description


def _read_plane(path: Path, frame_id: str, image_format: str, gamma: bool) -> np.ndarray:
    if not path.is_file():
        raise _fail(frame_id, f"file {path} not found")
    try:
        if image_format == "raw":
            return read_raw(path)
        return read_png(path, linear=gamma)
    except DatasetException as e:
        raise _fail(frame_id, e.message, e) from e


def load_dataset(path: PathLike) -> CaptureDataset:
    """Read a dataset written by :func:`save_dataset` (or laid out the same way)."""
    root = Path(path)
    description = _read_description(root)
    width, height = int(description["width"]), int(description["height"])
    image_format = description.get("image_format", "raw")
    if image_format not in IMAGE_FORMATS:
        raise DatasetException(message=f"{root}: unknown image format {image_format!r}")
    intrinsics = torch.tensor(description["intrinsics"], dtype=torch.float64)
    if intrinsics.shape != (3, 3):
        raise DatasetException(message=f"{root}: intrinsics must be 3x3")

    frames: List[Frame] = []
    for position, entry in enumerate(description["frames"]):
        frame_id = str(entry.get("id", frame_name(position)))
        camera = camera_from_dict(entry, intrinsics, width, height, frame_id)
        name = f"{frame_id}.{image_format}"
        image = _read_plane(root / FRAMES_DIR / name, frame_id, image_format, gamma=True)
        spec = _read_plane(root / SPEC_DIR / name, frame_id, image_format, gamma=False)
        labels = read_label_png(root / MASKS_DIR / f"{frame_id}.png", frame_id)
        albedo_path = root / ALBEDO_DIR / name
        albedo = (
            _read_plane(albedo_path, frame_id, image_format, gamma=False)
            if albedo_path.is_file()
            else None
        )
        if image.shape[:2] != (height, width) or image.shape[2] != 3:
            raise _fail(frame_id, f"image has shape {image.shape}, expected ({height}, {width}, 3)")
        frames.append(
            Frame(
                frame_id=frame_id,
                image=image,
                camera=camera,
                labels=labels,
                pseudo_spec=spec[:, :, 0],
                albedo=albedo,
            )
        )
    metadata = {str(k): str(v) for k, v in description.get("metadata", {}).items()}
    logger.info("Loaded %d frames from %s", len(frames), root)
    return CaptureDataset(frames, metadata)


def stack_frames(frames: Sequence[Frame]) -> Dict[str, Tensor]:
    """Images, labels and spec maps of ``frames`` stacked into tensors (F, H, W, ...)."""
    return {
        "image": torch.from_numpy(np.stack([f.image for f in frames])),
        "labels": torch.from_numpy(np.stack([f.labels for f in frames]).astype(np.int64)),
        "pseudo_spec": torch.from_numpy(np.stack([f.pseudo_spec for f in frames])),
    }
