"""
Flashlight colour calibration from a flash-lit white page.

The mean linear colour of a selected patch gives c_L, normalised so its
brightest channel is 1; the intensity scale s_L stays configured separately.
"""

from typing import Tuple

import numpy as np

from hybrid_inverse_render.utils import (
    LOGNAME_DATASET,
    DatasetException,
    ErrorSeverity,
    ValidationException,
    get_logger,
)

logger = get_logger(LOGNAME_DATASET)

Box = Tuple[int, int, int, int]


def calibrate_flash_color(image: np.ndarray, box: Box) -> Tuple[float, float, float]:
    """Normalised mean colour of ``image[row0:row1, col0:col1]``.

    Args:
        image: Linear RGB image (H, W, 3).
        box: (row0, col0, row1, col1) of the white patch, end-exclusive.

    Returns:
        Tuple[float, float, float]: c_L with max channel 1.
    """
    row0, col0, row1, col1 = box
    height, width = image.shape[:2]
    if not (0 <= row0 < row1 <= height and 0 <= col0 < col1 <= width):
        raise ValidationException(
            message=f"Calibration patch {box} lies outside the {height}x{width} image",
            user_message="The calibration patch must lie inside the image.",
            severity=ErrorSeverity.ERROR,
        )
    mean = np.asarray(image[row0:row1, col0:col1, :3], dtype=np.float64).reshape(-1, 3).mean(0)
    peak = float(mean.max())
    if not np.isfinite(peak) or peak <= 0.0 or float(mean.min()) <= 0.0:
        raise DatasetException(
            message=f"Calibration patch {box} has mean colour {mean.tolist()}",
            user_message="The calibration patch must be lit in every colour channel.",
            severity=ErrorSeverity.ERROR,
        )
    r, g, b = (float(v) for v in mean / peak)
    logger.info("Calibrated flash colour (%.4f, %.4f, %.4f) from patch %s", r, g, b, box)
    return r, g, b
