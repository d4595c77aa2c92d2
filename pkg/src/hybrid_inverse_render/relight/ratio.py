"""
Ratio-image relighting of frames aligned with the scan render.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from hybrid_inverse_render.relight.config import DEFAULT_RATIO_FLOOR
from hybrid_inverse_render.relight.sh_basis import ShBasisRenders, ShSolution, solve_sh_weights
from hybrid_inverse_render.utils import (
    LOGNAME_RELIGHT,
    ErrorSeverity,
    ValidationException,
    get_logger,
)

logger = get_logger(LOGNAME_RELIGHT)


def ratio_relight(
    src_render: np.ndarray,
    tgt_render: np.ndarray,
    performance_frame: np.ndarray,
    floor: float = DEFAULT_RATIO_FLOOR,
) -> np.ndarray:
    """(tgt / max(src, floor)) * frame, clamped to nonnegative values."""
    if floor <= 0.0:
        raise ValidationException(
            message=f"ratio floor must be positive, got {floor}",
            severity=ErrorSeverity.ERROR,
        )
    src = np.asarray(src_render, dtype=np.float64)
    tgt = np.asarray(tgt_render, dtype=np.float64)
    frame = np.asarray(performance_frame, dtype=np.float64)
    if not src.shape == tgt.shape == frame.shape:
        raise ValidationException(
            message=(
                f"ratio relighting needs aligned images, got {src.shape}, {tgt.shape} "
                f"and {frame.shape}"
            ),
            severity=ErrorSeverity.ERROR,
        )
    ratio = tgt / np.maximum(src, floor)
    return np.maximum(ratio * frame, 0.0)


@dataclass
class RelitSequence:
    """Relit frames with the source and target scan renders."""

    frames: List[np.ndarray]
    source_render: np.ndarray
    target_render: np.ndarray
    source_lighting: ShSolution


def relight_sequence(
    basis: ShBasisRenders,
    frames: Sequence[np.ndarray],
    target_weights: np.ndarray,
    mask_threshold: float = 0.5,
    floor: float = DEFAULT_RATIO_FLOOR,
    flash_lit: bool = False,
) -> RelitSequence:
    """Estimate the lighting of the first frame and move every frame to ``target_weights``.

    Flash-lit frames are matched against flash + estimated environment, and the relit
    frames keep only the target environment.
    """
    if not frames:
        raise ValidationException(
            message="relighting needs at least one performance frame",
            severity=ErrorSeverity.ERROR,
        )
    solution = solve_sh_weights(basis, frames[0], basis.mask(mask_threshold), flash_lit)
    source = basis.combine(solution.weights)
    if flash_lit:
        source = source + basis.flash
    target = basis.combine(target_weights)
    logger.info("Relighting %d frames (SH fit residual %.4g)", len(frames), solution.residual)
    relit = [ratio_relight(source, target, frame, floor) for frame in frames]
    return RelitSequence(relit, source, target, solution)
