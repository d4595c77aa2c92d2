"""Tests for the Laplace SDF-to-density conversion."""

import pytest
import torch

from hybrid_inverse_render.rendering import BETA_MIN, LaplaceDensity, sdf_to_density


def test_surface_value() -> None:
    """sigma(0) is exactly alpha / 2."""
    sdf = torch.zeros(1, dtype=torch.float64)

    assert sdf_to_density(sdf, 3.0, 0.1).item() == 1.5


def test_monotone_and_bounded() -> None:
    """Density is nonnegative, at most alpha and nonincreasing in the SDF."""
    sdf = torch.linspace(-1.0, 1.0, 401, dtype=torch.float64)

    sigma = sdf_to_density(sdf, 10.0, 0.05)

    assert (sigma >= 0.0).all() and (sigma <= 10.0).all()
    assert (sigma[1:] <= sigma[:-1]).all()
    assert sigma[0].item() == pytest.approx(10.0)
    assert sigma[-1].item() == pytest.approx(0.0, abs=1e-6)


def test_branches() -> None:
    """Inside and outside follow the two Laplace CDF branches."""
    sdf = torch.tensor([-0.1, 0.1], dtype=torch.float64)

    sigma = sdf_to_density(sdf, 2.0, 0.1)

    expected_inside = 2.0 * (1.0 - 0.5 * torch.exp(torch.tensor(-1.0, dtype=torch.float64)))
    expected_outside = 2.0 * 0.5 * torch.exp(torch.tensor(-1.0, dtype=torch.float64))
    assert sigma.tolist() == pytest.approx([expected_inside.item(), expected_outside.item()])


def test_slope_continuous_at_surface() -> None:
    """The SDF derivative at 0 matches -alpha / (2 beta) and its neighbours."""
    sdf = torch.tensor([-1e-6, 0.0, 1e-6], dtype=torch.float64, requires_grad=True)

    sdf_to_density(sdf, 2.0, 0.1).sum().backward()

    assert sdf.grad is not None
    assert sdf.grad.tolist() == pytest.approx([-10.0, -10.0, -10.0], rel=1e-4)


def test_no_overflow_far_from_surface() -> None:
    """Large distances give finite densities and gradients."""
    sdf = torch.tensor([-50.0, 50.0], dtype=torch.float64, requires_grad=True)

    sigma = sdf_to_density(sdf, 1.0, 1e-3)
    sigma.sum().backward()

    assert sigma.tolist() == [1.0, 0.0]
    assert sdf.grad is not None and torch.isfinite(sdf.grad).all()


def test_alpha_follows_beta() -> None:
    """Without a fixed alpha the density scale is 1 / beta."""
    density = LaplaceDensity(beta=0.2, dtype=torch.float64)

    assert density.beta().item() == pytest.approx(0.2)
    assert density.alpha().item() == pytest.approx(5.0)

    density.set_beta(0.5)
    assert density.alpha().item() == pytest.approx(2.0)


def test_fixed_alpha() -> None:
    """A fixed alpha ignores beta."""
    density = LaplaceDensity(beta=0.2, alpha=7.0, dtype=torch.float64)

    assert density.alpha().item() == 7.0
    assert density(torch.zeros(2, dtype=torch.float64)).tolist() == [3.5, 3.5]


def test_beta_floor() -> None:
    """beta never drops below the floor, whatever the raw parameter does."""
    density = LaplaceDensity(beta=0.0, dtype=torch.float64)
    with torch.no_grad():
        density.raw_beta.fill_(-1e-9)

    assert density.beta().item() >= BETA_MIN


def test_beta_receives_gradient() -> None:
    """Losses on the density reach the learnable beta."""
    density = LaplaceDensity(beta=0.1, dtype=torch.float64)

    density(torch.tensor([0.05, -0.02], dtype=torch.float64)).sum().backward()

    assert density.raw_beta.grad is not None
    assert density.raw_beta.grad.item() != 0.0
