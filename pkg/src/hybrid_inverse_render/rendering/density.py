"""
SDF to volume density conversion through the Laplace CDF.

    sigma(d) = alpha * (1 - 0.5 exp(d / beta))   for d <= 0
    sigma(d) = alpha * 0.5 exp(-d / beta)        for d > 0

Each branch exponentiates a clamped argument so neither overflows, sigma(0) is
exactly alpha / 2 and the slope at the surface is -alpha / (2 beta) from both sides.
"""

from typing import Optional, Union

import torch
from torch import Tensor, nn

from hybrid_inverse_render.rendering.config import BETA_MIN

Scalar = Union[Tensor, float]


def sdf_to_density(sdf: Tensor, alpha: Scalar, beta: Scalar) -> Tensor:
    """Laplace-CDF density alpha * Psi_beta(-sdf), nonnegative and nonincreasing in sdf."""
    inside = 1.0 - 0.5 * torch.exp(sdf.clamp(max=0.0) / beta)
    outside = 0.5 * torch.exp(-sdf.clamp(min=0.0) / beta)
    return alpha * torch.where(sdf <= 0.0, inside, outside)


class LaplaceDensity(nn.Module):
    """Density with a single learnable beta, floored at ``BETA_MIN``.

    alpha defaults to 1 / beta and follows beta while it is learned.
    """

    def __init__(
        self,
        beta: float = 0.1,
        alpha: Optional[float] = None,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        self.raw_beta = nn.Parameter(torch.tensor(max(beta - BETA_MIN, 0.0), dtype=dtype))
        self.fixed_alpha = alpha

    def beta(self) -> Tensor:
        """Current Laplace scale."""
        return self.raw_beta.abs() + BETA_MIN

    def alpha(self) -> Tensor:
        """Current density scale."""
        if self.fixed_alpha is not None:
            return torch.tensor(self.fixed_alpha, dtype=self.raw_beta.dtype)
        return 1.0 / self.beta()

    @torch.no_grad()
    def set_beta(self, beta: float) -> None:
        """Overwrite the learned scale."""
        self.raw_beta.fill_(max(beta - BETA_MIN, 0.0))

    def forward(self, sdf: Tensor) -> Tensor:
        """Density at the given signed distances."""
        return sdf_to_density(sdf, self.alpha(), self.beta())
