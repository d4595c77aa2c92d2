"""
Dense multi-resolution grids over the [-1,1]^3 cube.

A grid stores ``channels`` values at every vertex of each level. A query sums the
trilinear interpolations of all levels, each scaled by its level weight. The
spatial gradient is evaluated in closed form (piecewise constant per cell and
axis), so it stays differentiable with respect to the stored values.

Storage layout per level is ``(res_z, res_y, res_x, channels)``; flattened in C
order this is x-fastest with channels interleaved per vertex, the same order the
binary snapshots use.
"""

import itertools
import math
from typing import Optional, Sequence, Tuple

import torch
from torch import Tensor, nn

from hybrid_inverse_render.utils import (
    LOGNAME_GEOMETRY,
    OUT_OF_BOUNDS,
    Diagnostics,
    ErrorSeverity,
    ValidationException,
    get_logger,
)

DEFAULT_RESOLUTIONS: Tuple[int, ...] = (16, 32, 64)

logger = get_logger(LOGNAME_GEOMETRY)

_CORNERS = tuple(itertools.product((0, 1), repeat=3))


def vertex_positions(resolution: int, dtype: torch.dtype = torch.float32) -> Tensor:
    """World positions of the vertices of a ``resolution``^3 lattice, shape (R, R, R, 3).

    Indexed ``[z, y, x]`` with the last axis holding (x, y, z).
    """
    axis = torch.linspace(-1.0, 1.0, resolution, dtype=dtype)
    zz, yy, xx = torch.meshgrid(axis, axis, axis, indexing="ij")
    return torch.stack([xx, yy, zz], dim=-1)


class DenseGrid(nn.Module):
    """Summed multi-resolution trilinear grid.

    Attributes:
        resolutions: Vertices per axis for each level, coarsest first.
        channels: Values stored per vertex.
        values: One (R, R, R, channels) parameter per level.
        level_weights: Fixed per-level scale applied to each interpolation.
    """

    def __init__(
        self,
        resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
        channels: int = 1,
        level_weights: Optional[Sequence[float]] = None,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        resolutions = tuple(int(r) for r in resolutions)
        if not resolutions or any(r < 2 for r in resolutions):
            raise ValidationException(
                message=f"Grid resolutions must be >= 2 per level, got {resolutions}",
                user_message="Every grid level needs at least 2 vertices per axis.",
                severity=ErrorSeverity.ERROR,
            )
        if channels < 1:
            raise ValidationException(
                message=f"Grid channel count must be positive, got {channels}",
                severity=ErrorSeverity.ERROR,
            )
        weights = [1.0] * len(resolutions) if level_weights is None else list(level_weights)
        if len(weights) != len(resolutions):
            raise ValidationException(
                message=(
                    f"{len(weights)} level weights given for {len(resolutions)} grid levels"
                ),
                severity=ErrorSeverity.ERROR,
            )
        self.resolutions = resolutions
        self.channels = channels
        self.values = nn.ParameterList(
            [nn.Parameter(torch.zeros(r, r, r, channels, dtype=dtype)) for r in resolutions]
        )
        self.register_buffer("level_weights", torch.tensor(weights, dtype=dtype))

    @property
    def dtype(self) -> torch.dtype:
        """Floating point type of the stored values."""
        return self.values[0].dtype

    def voxel_size(self, level: int) -> float:
        """Edge length of one cell of ``level``."""
        return 2.0 / (self.resolutions[level] - 1)

    @property
    def finest_voxel_size(self) -> float:
        """Edge length of the finest cells."""
        return min(self.voxel_size(i) for i in range(len(self.resolutions)))

    @property
    def coarsest_voxel_diagonal(self) -> float:
        """Diagonal length of the coarsest cells."""
        return math.sqrt(3.0) * max(self.voxel_size(i) for i in range(len(self.resolutions)))

    def query(self, points: Tensor) -> Tensor:
        """Interpolated values at ``points`` (N, 3), shape (N, channels)."""
        value, _ = self._interpolate(points, with_gradient=False)
        return value

    def query_with_gradient(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Interpolated values (N, C) and their spatial gradients (N, C, 3)."""
        value, gradient = self._interpolate(points, with_gradient=True)
        assert gradient is not None
        return value, gradient

    def _interpolate(self, points: Tensor, with_gradient: bool) -> Tuple[Tensor, Optional[Tensor]]:
        points = points.to(self.dtype)
        clamped = points.clamp(-1.0, 1.0)
        Diagnostics.increment(OUT_OF_BOUNDS, int((points != clamped).any(dim=-1).sum()))

        n_points = points.shape[0]
        total = points.new_zeros(n_points, self.channels)
        total_gradient = points.new_zeros(n_points, self.channels, 3) if with_gradient else None

        for level, table in enumerate(self.values):
            res = self.resolutions[level]
            scale = (res - 1) / 2.0
            coords = (clamped + 1.0) * scale
            base = torch.floor(coords).long().clamp(0, res - 2)
            frac = coords - base.to(coords.dtype)
            flat = table.reshape(-1, self.channels)

            level_value = points.new_zeros(n_points, self.channels)
            level_gradient = points.new_zeros(n_points, self.channels, 3) if with_gradient else None
            for dx, dy, dz in _CORNERS:
                index = ((base[:, 2] + dz) * res + (base[:, 1] + dy)) * res + (base[:, 0] + dx)
                corner = flat[index]
                wx = frac[:, 0] if dx else 1.0 - frac[:, 0]
                wy = frac[:, 1] if dy else 1.0 - frac[:, 1]
                wz = frac[:, 2] if dz else 1.0 - frac[:, 2]
                level_value = level_value + (wx * wy * wz)[:, None] * corner
                if level_gradient is not None:
                    sx = 1.0 if dx else -1.0
                    sy = 1.0 if dy else -1.0
                    sz = 1.0 if dz else -1.0
                    dweight = torch.stack([sx * wy * wz, sy * wx * wz, sz * wx * wy], dim=-1)
                    level_gradient = level_gradient + corner[:, :, None] * dweight[:, None, :]

            weight = self.level_weights[level]
            total = total + weight * level_value
            if total_gradient is not None and level_gradient is not None:
                total_gradient = total_gradient + (weight * scale) * level_gradient

        return total, total_gradient


class SdfGridField(DenseGrid):
    """Single-channel grid holding the signed distance of the non-eye region."""

    def __init__(
        self,
        resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
        level_weights: Optional[Sequence[float]] = None,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__(resolutions, channels=1, level_weights=level_weights, dtype=dtype)

    def sdf(self, points: Tensor) -> Tensor:
        """Signed distance at ``points``, shape (N,)."""
        return self.query(points)[:, 0]

    def sdf_and_gradient(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Signed distance (N,) and its analytic spatial gradient (N, 3)."""
        value, gradient = self.query_with_gradient(points)
        return value[:, 0], gradient[:, 0, :]

    @torch.no_grad()
    def init_sphere(self, r0: float) -> "SdfGridField":
        """Initialise the field to the signed distance of a sphere of radius ``r0``.

        The coarsest level stores ||v|| - r0 (divided by its level weight), every
        finer level is zeroed.
        """
        if not 0.0 < r0 < 1.0:
            raise ValidationException(
                message=f"Sphere initialisation radius must be in (0, 1), got {r0}",
                user_message="The initial sphere radius r0 must lie strictly between 0 and 1.",
                severity=ErrorSeverity.ERROR,
            )
        coarsest = 0
        for level, table in enumerate(self.values):
            if level == coarsest:
                positions = vertex_positions(self.resolutions[level], dtype=table.dtype)
                distance = positions.norm(dim=-1) - r0
                table.copy_((distance / self.level_weights[level])[..., None])
            else:
                table.zero_()
        logger.info(
            "Initialised SDF grid %s to a sphere of radius %.3f", self.resolutions, r0
        )
        return self


def sphere_initialised_grid(
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    r0: float = 0.5,
    level_weights: Optional[Sequence[float]] = None,
    dtype: torch.dtype = torch.float32,
) -> SdfGridField:
    """Create an :class:`SdfGridField` initialised to a sphere of radius ``r0``."""
    return SdfGridField(resolutions, level_weights=level_weights, dtype=dtype).init_sphere(r0)


def init_sphere(grid: SdfGridField, r0: float) -> SdfGridField:
    """Functional form of :meth:`SdfGridField.init_sphere`."""
    return grid.init_sphere(r0)
