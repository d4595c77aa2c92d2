"""
Renders of the fitted scan under the nine SH basis lights and the least-squares
fit of SH weights to an aligned image.

Basis render j is c * max(Y_j(n), 0) with the flash off, so any environment
with weights W renders as sum_j W_j * basis_j.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch

from hybrid_inverse_render.appearance import (
    SH_COEFFICIENTS,
    CombinedLight,
    clamped_sh_basis,
    flash_color_tuple,
)
from hybrid_inverse_render.rendering import (
    Camera,
    HybridScene,
    RenderConfig,
    render_surface_image,
    to_numpy,
)
from hybrid_inverse_render.utils import (
    LOGNAME_RELIGHT,
    DatasetException,
    ErrorSeverity,
    SystemException,
    ValidationException,
    get_logger,
)

logger = get_logger(LOGNAME_RELIGHT)

PathLike = Union[str, Path]


@dataclass
class ShBasisRenders:
    """Basis renders (9, H, W, 3), the flash-only render (H, W, 3) and coverage (H, W)."""

    basis: np.ndarray
    flash: np.ndarray
    opacity: np.ndarray

    def mask(self, threshold: float = 0.5) -> np.ndarray:
        """Pixels covered by the scan."""
        return self.opacity > threshold

    def combine(self, weights: np.ndarray) -> np.ndarray:
        """sum_j W_j basis_j for weights (9,) or (9, 3)."""
        weights = as_sh_weights(weights)
        return np.einsum("jhwc,jc->hwc", self.basis, weights)


@dataclass
class ShSolution:
    """Per-channel SH weights (9, 3) with the fit residual."""

    weights: np.ndarray
    residual: float
    rank: int

    @property
    def rank_deficient(self) -> bool:
        """True when the masked basis renders do not span nine dimensions."""
        return self.rank < SH_COEFFICIENTS


def as_sh_weights(weights: np.ndarray) -> np.ndarray:
    """Weights as (9, 3); grey (9,) weights apply to every channel."""
    array = np.asarray(weights, dtype=np.float64)
    if array.shape == (SH_COEFFICIENTS,):
        array = np.repeat(array[:, None], 3, axis=1)
    if array.shape != (SH_COEFFICIENTS, 3):
        raise ValidationException(
            message=f"SH weights must have shape (9,) or (9, 3), got {array.shape}",
            severity=ErrorSeverity.ERROR,
        )
    return array


@torch.no_grad()
def render_sh_basis(
    scene: HybridScene,
    camera: Camera,
    light: Optional[CombinedLight] = None,
    config: Optional[RenderConfig] = None,
) -> ShBasisRenders:
    """Render the scan from ``camera`` under every SH basis light and under the flash alone."""
    config = config or RenderConfig()
    flash = CombinedLight(ambient_enabled=False, dtype=scene.dtype)
    if light is not None:
        flash = CombinedLight(
            flash_scale=float(light.flash_scale.detach()),
            flash_color=flash_color_tuple(light),
            ambient_enabled=False,
            dtype=scene.dtype,
        )
    render = render_surface_image(camera, scene, flash, config)
    normals = render.normal.reshape(-1, 3)
    coverage = render.opacity.reshape(-1, 1)
    albedo = render.albedo.reshape(-1, 3)
    shading = clamped_sh_basis(normals) * coverage
    basis = albedo[None, :, :] * shading.T[:, :, None]
    return ShBasisRenders(
        basis=to_numpy(basis).reshape(SH_COEFFICIENTS, camera.height, camera.width, 3),
        flash=to_numpy(render.rgb),
        opacity=to_numpy(render.opacity),
    )


def solve_sh_weights(
    basis: ShBasisRenders, target: np.ndarray, mask: np.ndarray, flash_lit: bool = False
) -> ShSolution:
    """Least-squares SH weights per channel over the masked pixels.

    With ``flash_lit`` the flash-only render is removed from ``target`` first, so only
    the ambient part of a flash + ambient frame is explained by the SH lights.
    A rank-deficient system returns the minimum-norm solution and logs a warning.
    """
    selected = np.asarray(mask, dtype=bool)
    target = np.asarray(target, dtype=np.float64)
    if flash_lit:
        target = target - basis.flash
    weights = np.zeros((SH_COEFFICIENTS, 3), dtype=np.float64)
    if not selected.any():
        logger.warning("SH solve received an empty mask; returning zero weights")
        return ShSolution(weights, 0.0, 0)
    residual = 0.0
    rank = SH_COEFFICIENTS
    for channel in range(3):
        system = basis.basis[:, selected, channel].astype(np.float64).T
        rhs = target[selected, channel]
        solution, _, channel_rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
        weights[:, channel] = solution
        residual += float(np.sum((system @ solution - rhs) ** 2))
        rank = min(rank, int(channel_rank))
    result = ShSolution(weights, residual, rank)
    if result.rank_deficient:
        logger.warning("SH basis renders have rank %d; using the minimum-norm solution", rank)
    return result


def load_sh_weights(path: PathLike) -> np.ndarray:
    """Read ``{"coefficients": ...}`` with 9 grey or 9x3 RGB SH weights."""
    path = Path(path)
    try:
        state = json.loads(path.read_text(encoding="utf-8"))
        coefficients = state["coefficients"] if isinstance(state, dict) else state
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"SH environment not found: {path}",
            user_message=f"The lighting file {path} does not exist.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise DatasetException(
            message=f"Malformed SH environment {path}: {e}",
            user_message=f"The lighting file {path} must hold 9 SH coefficients.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return as_sh_weights(np.asarray(coefficients, dtype=np.float64))


def save_sh_weights(path: PathLike, weights: np.ndarray, residual: float = 0.0) -> Path:
    """Write SH weights in the format :func:`load_sh_weights` reads."""
    path = Path(path)
    state = {"coefficients": as_sh_weights(weights).tolist(), "residual": residual}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(state, indent=2), encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write SH weights {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return path
