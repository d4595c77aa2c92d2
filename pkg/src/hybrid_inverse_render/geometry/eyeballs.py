"""
Analytic eyeball geometry: two spheres sharing one radius.

The eyeballs are placed by hand and never optimised. Their union has an exact
signed distance, min(||x - p_l|| - r, ||x - p_r|| - r), with the radial
direction of the nearer sphere as gradient.
"""

from dataclasses import dataclass
from typing import Tuple

import torch
from torch import Tensor

from hybrid_inverse_render.utils import ErrorSeverity, ValidationException

Vector3 = Tuple[float, float, float]


@dataclass(frozen=True)
class SphereEyeballs:
    """Left/right eyeball centres and their shared radius (scene units)."""

    p_l: Vector3
    p_r: Vector3
    r: float

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            raise ValidationException(
                message=f"Eyeball radius must be positive, got {self.r}",
                user_message="The eyeball radius must be greater than zero.",
                severity=ErrorSeverity.ERROR,
            )
        for name, centre in (("p_l", self.p_l), ("p_r", self.p_r)):
            if len(centre) != 3 or any(not -1.0 <= float(c) <= 1.0 for c in centre):
                raise ValidationException(
                    message=f"Eyeball centre {name}={centre} lies outside the [-1,1]^3 cube",
                    user_message="Both eyeball centres must lie inside the [-1,1]^3 cube.",
                    severity=ErrorSeverity.ERROR,
                )

    def centres(self, dtype: torch.dtype = torch.float32) -> Tensor:
        """Both centres stacked, shape (2, 3)."""
        return torch.tensor([self.p_l, self.p_r], dtype=dtype)

    def sdf_and_gradient(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Exact union SDF (N,) and the radial gradient of the nearer sphere (N, 3).

        The gradient is zero at a sphere centre.
        """
        offsets = points[:, None, :] - self.centres(points.dtype)[None, :, :]
        distances = offsets.norm(dim=-1)
        nearer = (distances[:, 1] < distances[:, 0]).long()
        distance = distances.gather(1, nearer[:, None])[:, 0]
        offset = offsets[torch.arange(points.shape[0]), nearer]
        gradient = offset / distance.clamp_min(torch.finfo(points.dtype).tiny)[:, None]
        gradient = torch.where((distance > 0)[:, None], gradient, torch.zeros_like(gradient))
        return distance - self.r, gradient

    def sdf(self, points: Tensor) -> Tensor:
        """Exact union SDF of the two spheres, shape (N,)."""
        return self.sdf_and_gradient(points)[0]


def sphere_sdf(x: Tensor, eyes: SphereEyeballs) -> Tensor:
    """min(||x - p_l|| - r, ||x - p_r|| - r) for points (N, 3) or a single 3-vector."""
    single = x.dim() == 1
    points = x[None, :] if single else x
    value = eyes.sdf(points)
    return value[0] if single else value
