"""
Training objective.

Every term is a mean over rays (or sample points) and is nonnegative; an empty
selection evaluates to 0. Stage two only keeps the photometric term and the
reflectance regulariser, whatever the geometry terms are given.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import torch
from torch import Tensor, nn

from hybrid_inverse_render.data import Label
from hybrid_inverse_render.training.config import LossWeights, Stage
from hybrid_inverse_render.utils import InvariantException

TERM_NAMES = ("l1", "mask", "eikonal", "smooth_hair", "smooth_other", "comp", "ref")

NormalFunction = Callable[[Tensor], Tensor]


class ScaleCompensator(nn.Module):
    """Learnable k > 0 (stored as log k) resolving the pseudo specular scale."""

    def __init__(self, k: float = 1.0, dtype: torch.dtype = torch.float32) -> None:
        super().__init__()
        self.log_k = nn.Parameter(torch.tensor(float(k), dtype=dtype).log())

    def forward(self) -> Tensor:
        return self.log_k.exp()

    @property
    def k(self) -> float:
        """Current k."""
        return float(self.log_k.detach().exp())


def _check_shapes(a: Tensor, b: Tensor, name: str) -> None:
    if a.shape != b.shape:
        raise InvariantException(
            message=f"{name}: shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}",
        )


def _masked_mean(values: Tensor, mask: Tensor) -> Tensor:
    count = mask.sum()
    if int(count) == 0:
        return values.new_zeros(())
    return (values * mask.to(values.dtype)).sum() / count.to(values.dtype)


def photometric_l1(rendered: Tensor, target: Tensor) -> Tensor:
    """Mean absolute difference over rays and channels, in linear space."""
    _check_shapes(rendered, target, "photometric_l1")
    if rendered.numel() == 0:
        return rendered.new_zeros(())
    return (rendered - target.to(rendered.dtype)).abs().mean()


def mask_loss(rendered_opacity: Tensor, target_mask: Tensor) -> Tensor:
    """Mean L1 between opacity and the binary foreground mask."""
    _check_shapes(rendered_opacity, target_mask, "mask_loss")
    if rendered_opacity.numel() == 0:
        return rendered_opacity.new_zeros(())
    return (rendered_opacity - target_mask.to(rendered_opacity.dtype)).abs().mean()


def eikonal_loss(gradients: Tensor) -> Tensor:
    """Mean of (||g|| - 1)^2."""
    if gradients.shape[0] == 0:
        return gradients.new_zeros(())
    return ((gradients.norm(dim=-1) - 1.0) ** 2).mean()


def random_unit_vectors(
    count: int, dtype: torch.dtype, generator: Optional[torch.Generator] = None
) -> Tensor:
    """Directions uniform on the unit sphere, shape (count, 3)."""
    directions = torch.randn((count, 3), generator=generator, dtype=dtype)
    return directions / directions.norm(dim=-1, keepdim=True).clamp_min(1e-12)


def normal_smooth_residuals(
    points: Tensor, normal_fn: NormalFunction, eps: float, directions: Tensor
) -> Tensor:
    """1 - n(x) . n(x + eps u) per point, with one offset direction per point."""
    normals = normal_fn(points)
    neighbours = normal_fn(points + eps * directions.to(points.dtype))
    return 1.0 - (normals * neighbours).sum(dim=-1)


def normal_smooth_loss(
    points: Tensor,
    normal_fn: NormalFunction,
    eps: float,
    generator: Optional[torch.Generator] = None,
    directions: Optional[Tensor] = None,
) -> Tensor:
    """Mean normal disagreement between each point and a random neighbour at distance eps."""
    if points.shape[0] == 0:
        return points.new_zeros(())
    if directions is None:
        directions = random_unit_vectors(points.shape[0], points.dtype, generator)
    return normal_smooth_residuals(points, normal_fn, eps, directions).mean()


def composition_loss(
    opacity_E: Tensor, opacity_S: Tensor, mask_E: Tensor, mask_S: Tensor
) -> Tensor:
    """Mean L1 of the eye opacity plus mean L1 of the skin-region opacity."""
    _check_shapes(opacity_E, mask_E, "composition_loss")
    _check_shapes(opacity_S, mask_S, "composition_loss")
    if opacity_E.numel() == 0:
        return opacity_E.new_zeros(())
    eye = (opacity_E - mask_E.to(opacity_E.dtype)).abs().mean()
    skin = (opacity_S - mask_S.to(opacity_S.dtype)).abs().mean()
    return eye + skin


def reflectance_reg(
    rendered_spec: Tensor, pseudo_spec: Tensor, region_labels: Tensor, k: Tensor
) -> Tensor:
    """Mean of |k s_hat - s_pseudo| over non-eye rays; hair rays target 0."""
    _check_shapes(rendered_spec, pseudo_spec, "reflectance_reg")
    target = torch.where(
        region_labels == int(Label.HAIR),
        torch.zeros_like(pseudo_spec),
        pseudo_spec,
    ).to(rendered_spec.dtype)
    residual = (k * rendered_spec - target).abs()
    return _masked_mean(residual, region_labels != int(Label.EYE))


@dataclass
class LossInputs:
    """Everything the objective may need for one batch; absent terms stay None.

    ``smooth_residuals`` holds one normal-smoothness residual per ray and
    ``labels`` the ray labels (values of :class:`Label`).
    """

    rendered_rgb: Tensor
    target_rgb: Tensor
    labels: Tensor
    opacity: Optional[Tensor] = None
    opacity_E: Optional[Tensor] = None
    opacity_S: Optional[Tensor] = None
    sample_gradients: Optional[Tensor] = None
    smooth_residuals: Optional[Tensor] = None
    rendered_spec: Optional[Tensor] = None
    pseudo_spec: Optional[Tensor] = None
    k: Optional[Tensor] = None


def loss_terms(inputs: LossInputs, stage: Stage) -> Dict[str, Tensor]:
    """Unweighted terms active in ``stage``."""
    labels = inputs.labels
    terms: Dict[str, Tensor] = {"l1": photometric_l1(inputs.rendered_rgb, inputs.target_rgb)}
    if inputs.rendered_spec is not None and inputs.pseudo_spec is not None:
        k = inputs.k if inputs.k is not None else inputs.rendered_spec.new_ones(())
        terms["ref"] = reflectance_reg(inputs.rendered_spec, inputs.pseudo_spec, labels, k)
    if stage == Stage.TWO:
        return terms

    foreground = labels != int(Label.BACKGROUND)
    if inputs.opacity is not None:
        terms["mask"] = mask_loss(inputs.opacity, foreground.to(inputs.opacity.dtype))
    if inputs.sample_gradients is not None:
        terms["eikonal"] = eikonal_loss(inputs.sample_gradients)
    if inputs.smooth_residuals is not None:
        hair = labels == int(Label.HAIR)
        terms["smooth_hair"] = _masked_mean(inputs.smooth_residuals, hair)
        terms["smooth_other"] = _masked_mean(inputs.smooth_residuals, ~hair)
    if inputs.opacity_E is not None and inputs.opacity_S is not None:
        eye = labels == int(Label.EYE)
        skin = foreground & ~eye
        terms["comp"] = composition_loss(
            inputs.opacity_E,
            inputs.opacity_S,
            eye.to(inputs.opacity_E.dtype),
            skin.to(inputs.opacity_S.dtype),
        )
    return terms


def _weight_of(term: str, weights: LossWeights) -> float:
    return {
        "l1": weights.w_l1,
        "mask": weights.w_mask,
        "eikonal": weights.w_eikonal,
        "smooth_hair": weights.w_eps_hair,
        "smooth_other": weights.w_eps_other,
        "comp": weights.w_comp,
        "ref": weights.w_ref,
    }[term]


def total_loss(
    inputs: LossInputs, weights: LossWeights, stage: Stage
) -> Tuple[Tensor, Dict[str, float]]:
    """Weighted sum of the active terms and the unweighted per-term breakdown."""
    terms = loss_terms(inputs, stage)
    total = inputs.rendered_rgb.new_zeros(())
    for name, value in terms.items():
        weight = _weight_of(name, weights)
        if weight > 0.0:
            total = total + weight * value
    breakdown = {name: float(value.detach()) for name, value in terms.items()}
    return total, breakdown
