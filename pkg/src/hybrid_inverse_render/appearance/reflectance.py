"""
Spatially varying reflectance stored in a 5-channel dense grid.

Raw channels map through smooth squashing functions:
    c   = sigmoid(raw[0:3])                       diffuse albedo, in [0, 1]^3
    s   = sigmoid(raw[3])                         specular albedo, in [0, 1]
    rho = rho_min + (1 - rho_min) sigmoid(raw[4])  roughness, in [rho_min, 1]

The diffuse albedo is shared by both regions; specular albedo and roughness of
the eyeballs come from a fixed :class:`EyePrior`.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import torch
from torch import Tensor

from hybrid_inverse_render.appearance.brdf import ROUGHNESS_MIN
from hybrid_inverse_render.geometry import DEFAULT_RESOLUTIONS, DenseGrid, select
from hybrid_inverse_render.utils import ErrorSeverity, ValidationException

REFLECTANCE_CHANNELS = 5


class Material(NamedTuple):
    """Activated material at a batch of points."""

    c: Tensor
    s: Tensor
    rho: Tensor


@dataclass(frozen=True)
class EyePrior:
    """Predefined specular albedo and roughness of the eyeballs."""

    s_E: float = 0.25
    rho_E: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.s_E <= 1.0:
            raise ValidationException(
                message=f"Eye specular albedo must be in [0, 1], got {self.s_E}",
                severity=ErrorSeverity.ERROR,
            )
        if not ROUGHNESS_MIN <= self.rho_E <= 1.0:
            raise ValidationException(
                message=f"Eye roughness must be in [{ROUGHNESS_MIN}, 1], got {self.rho_E}",
                severity=ErrorSeverity.ERROR,
            )


def _logit(p: float) -> float:
    p = min(max(p, 1e-6), 1.0 - 1e-6)
    return float(torch.logit(torch.tensor(p, dtype=torch.float64)))


class ReflectanceField(DenseGrid):
    """Grid-backed diffuse albedo, specular albedo and roughness."""

    def __init__(
        self,
        resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
        level_weights: Optional[Sequence[float]] = None,
        rho_min: float = ROUGHNESS_MIN,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__(
            resolutions, channels=REFLECTANCE_CHANNELS, level_weights=level_weights, dtype=dtype
        )
        self.rho_min = rho_min

    def activate(self, raw: Tensor) -> Material:
        """Map raw channels (N, 5) to their bounded ranges."""
        c = torch.sigmoid(raw[:, 0:3])
        s = torch.sigmoid(raw[:, 3])
        rho = self.rho_min + (1.0 - self.rho_min) * torch.sigmoid(raw[:, 4])
        return Material(c, s, rho)

    def sample(self, points: Tensor) -> Material:
        """Activated S-region material at ``points`` (N, 3)."""
        return self.activate(self.query(points))

    @torch.no_grad()
    def init_constant(
        self, c: Tuple[float, float, float] = (0.5, 0.5, 0.5), s: float = 0.1, rho: float = 0.5
    ) -> "ReflectanceField":
        """Set the coarsest level so every point activates to the given material."""
        rho_unit = (rho - self.rho_min) / (1.0 - self.rho_min)
        raw = torch.tensor(
            [_logit(c[0]), _logit(c[1]), _logit(c[2]), _logit(s), _logit(rho_unit)],
            dtype=self.dtype,
        )
        for level, table in enumerate(self.values):
            if level == 0:
                table.copy_((raw / self.level_weights[0]).expand_as(table))
            else:
                table.zero_()
        return self


def material_at(
    x: Tensor, refl: ReflectanceField, prior: EyePrior, sdf_E: Tensor, sdf_S: Tensor
) -> Material:
    """Material of the hybrid scene: field albedo everywhere, eye prior where E wins."""
    field = refl.sample(x)
    s = select(prior.s_E, field.s, sdf_E, sdf_S)
    rho = select(prior.rho_E, field.rho, sdf_E, sdf_S)
    return Material(field.c, s, rho)
