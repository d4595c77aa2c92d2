"""
Subpackage for capture data: dataset I/O, the synthetic generator and flash
calibration.
"""

from hybrid_inverse_render.data.calibration import calibrate_flash_color
from hybrid_inverse_render.data.dataset import (
    CAMERAS_FILENAME,
    MASK_PALETTE,
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
from hybrid_inverse_render.data.synthetic import (
    DEFAULT_PRIMITIVES,
    HeadPrimitive,
    SmoothMinHead,
    SyntheticConfig,
    SyntheticMaterials,
    SyntheticScene,
    build_synthetic_scene,
    generate_synthetic,
    smooth_min,
)

__all__ = [
    "calibrate_flash_color",
    "CAMERAS_FILENAME",
    "MASK_PALETTE",
    "CaptureDataset",
    "Frame",
    "Label",
    "frame_name",
    "load_dataset",
    "read_label_png",
    "save_dataset",
    "stack_frames",
    "write_label_png",
    "DEFAULT_PRIMITIVES",
    "HeadPrimitive",
    "SmoothMinHead",
    "SyntheticConfig",
    "SyntheticMaterials",
    "SyntheticScene",
    "build_synthetic_scene",
    "generate_synthetic",
    "smooth_min",
]
