"""
Hybrid geometry: a grid SDF for the non-eye region S unioned with analytic
eyeball spheres for region E.

Attributes of the union are chosen with :func:`select`: the E attribute wins
whenever sdf_E <= sdf_S (ties go to E), otherwise the S attribute. Gradients flow
only through the chosen branch; the selector SDF values receive none from the
choice itself. The union SDF is the selected SDF, i.e. the exact minimum.

Without eyeballs the geometry is the holistic single-field representation:
sdf_E is +inf everywhere, so region S owns every point.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple, Optional, Protocol, Tuple, Union

import torch
from torch import Tensor, nn

from hybrid_inverse_render.geometry.eyeballs import SphereEyeballs
from hybrid_inverse_render.utils import DEGENERATE_NORMALS, Diagnostics

Attribute = Union[Tensor, float]

# Returned for points where the SDF gradient vanishes.
FALLBACK_NORMAL = (0.0, 0.0, 1.0)


class Region(IntEnum):
    """Which representation owns a point."""

    E = 0
    S = 1


class SdfField(Protocol):
    """Anything that can evaluate a signed distance and its spatial gradient."""

    def sdf_and_gradient(self, points: Tensor) -> Tuple[Tensor, Tensor]:
        """Signed distance (N,) and gradient (N, 3) at ``points`` (N, 3)."""


class UnionSdf(NamedTuple):
    """Union SDF together with both component values."""

    sdf: Tensor
    sdf_E: Tensor
    sdf_S: Tensor


@dataclass
class SamplePoints:
    """Batch of evaluated sample points (the per-point record of the hybrid scene).

    Attributes:
        x: Positions (N, 3).
        sdf_E: Eyeball SDF (N,).
        sdf_S: Grid SDF (N,).
        sdf: Union SDF, min(sdf_E, sdf_S) (N,).
        gradient: Gradient of the union SDF (N, 3), unnormalised.
        normal: Unit normal (N, 3); the fallback axis where the gradient vanishes.
        is_eye: True where region E owns the point (N,).
    """

    x: Tensor
    sdf_E: Tensor
    sdf_S: Tensor
    sdf: Tensor
    gradient: Tensor
    normal: Tensor
    is_eye: Tensor

    @property
    def region(self) -> Tensor:
        """Region per point as integer codes of :class:`Region`."""
        return torch.where(self.is_eye, int(Region.E), int(Region.S))


def select(a_E: Attribute, a_S: Attribute, sdf_E: Tensor, sdf_S: Tensor) -> Tensor:
    """Choose ``a_E`` where sdf_E <= sdf_S and ``a_S`` elsewhere.

    Attributes may be scalars or carry trailing feature dimensions beyond the
    shape of the SDF tensors; the choice broadcasts over them.
    """
    sdf_E = torch.as_tensor(sdf_E)
    sdf_S = torch.as_tensor(sdf_S, dtype=sdf_E.dtype)
    choose_eye = sdf_E <= sdf_S
    a_E = torch.as_tensor(a_E, dtype=sdf_E.dtype)
    a_S = torch.as_tensor(a_S, dtype=sdf_E.dtype)
    rank = max(a_E.dim(), a_S.dim())
    while choose_eye.dim() < rank:
        choose_eye = choose_eye.unsqueeze(-1)
    return torch.where(choose_eye, a_E, a_S)


class HybridGeometry(nn.Module):
    """Union of an S-region SDF field and the two eyeball spheres, if any."""

    def __init__(self, field: SdfField, eyes: Optional[SphereEyeballs]) -> None:
        super().__init__()
        self.field = field
        self.eyes = eyes

    @property
    def holistic(self) -> bool:
        """True when the S field alone represents the whole head."""
        return self.eyes is None

    def _eye_sdf(self, points: Tensor, like: Tensor) -> Tuple[Tensor, Tensor]:
        if self.eyes is None:
            return torch.full_like(like, float("inf")), torch.zeros_like(points, dtype=like.dtype)
        sdf_E, gradient_E = self.eyes.sdf_and_gradient(points)
        return sdf_E.to(like.dtype), gradient_E.to(like.dtype)

    def union_sdf(self, points: Tensor) -> UnionSdf:
        """Union SDF and its components at ``points`` (N, 3)."""
        sdf_S, _ = self.field.sdf_and_gradient(points)
        sdf_E, _ = self._eye_sdf(points, sdf_S)
        return UnionSdf(select(sdf_E, sdf_S, sdf_E, sdf_S), sdf_E, sdf_S)

    def sdf(self, points: Tensor) -> Tensor:
        """Union SDF only, shape (N,)."""
        return self.union_sdf(points).sdf

    def evaluate(self, points: Tensor) -> SamplePoints:
        """Full evaluation: component SDFs, union, gradient, normal and region."""
        sdf_S, gradient_S = self.field.sdf_and_gradient(points)
        sdf_E, gradient_E = self._eye_sdf(points, sdf_S)

        sdf = select(sdf_E, sdf_S, sdf_E, sdf_S)
        gradient = select(gradient_E, gradient_S, sdf_E, sdf_S)
        normal = normalize_or_fallback(gradient)
        return SamplePoints(
            x=points,
            sdf_E=sdf_E,
            sdf_S=sdf_S,
            sdf=sdf,
            gradient=gradient,
            normal=normal,
            is_eye=sdf_E <= sdf_S,
        )

    def normal(self, points: Tensor) -> Tensor:
        """Unit normals of the union SDF at ``points`` (N, 3)."""
        return self.evaluate(points).normal


def normalize_or_fallback(gradient: Tensor) -> Tensor:
    """Normalise gradients; zero gradients map to +z and bump the degenerate counter."""
    length = gradient.norm(dim=-1, keepdim=True)
    degenerate = length[:, 0] <= 0.0
    Diagnostics.increment(DEGENERATE_NORMALS, int(degenerate.sum()))
    safe_length = torch.where(degenerate[:, None], torch.ones_like(length), length)
    fallback = torch.tensor(FALLBACK_NORMAL, dtype=gradient.dtype).expand_as(gradient)
    return torch.where(degenerate[:, None], fallback, gradient / safe_length)


def union_sdf(x: Tensor, grid: SdfField, eyes: Optional[SphereEyeballs]) -> UnionSdf:
    """Functional form of :meth:`HybridGeometry.union_sdf` for points (N, 3)."""
    return HybridGeometry(grid, eyes).union_sdf(x)


def normal(x: Tensor, grid: SdfField, eyes: Optional[SphereEyeballs]) -> Tensor:
    """Functional form of :meth:`HybridGeometry.normal` for points (N, 3)."""
    return HybridGeometry(grid, eyes).normal(x)
