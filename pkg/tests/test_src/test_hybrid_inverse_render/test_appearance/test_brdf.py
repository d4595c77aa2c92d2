"""Tests for the GGX reflectance model."""

import math

import pytest
import torch
import torch.nn.functional as F

from hybrid_inverse_render.appearance import (
    ROUGHNESS_MIN,
    eval_brdf,
    fresnel_schlick,
    ggx_distribution,
    smith_g1,
)


def _unit(generator: torch.Generator, count: int) -> torch.Tensor:
    return F.normalize(torch.randn(count, 3, generator=generator, dtype=torch.float64), dim=-1)


def _constant(count: int, value: float) -> torch.Tensor:
    return torch.full((count,), value, dtype=torch.float64)


def test_normal_incidence_closed_form() -> None:
    """With l = v = n the lobe reduces to s / (4 pi alpha^2)."""
    n = torch.tensor([[0.0, 0.0, 1.0]], dtype=torch.float64)
    c = torch.tensor([[0.2, 0.4, 0.6]], dtype=torch.float64)
    s, rho = _constant(1, 0.5), _constant(1, 0.5)

    value = eval_brdf(n, n, n, c, s, rho)

    alpha = 0.25
    expected = c / math.pi + 0.5 / (4.0 * math.pi * alpha**2)
    assert torch.allclose(value, expected)


def test_diffuse_only_without_specular(generator: torch.Generator) -> None:
    """s = 0 leaves the Lambertian c / pi in the upper hemisphere."""
    n = torch.tensor([[0.0, 0.0, 1.0]], dtype=torch.float64).expand(8, 3)
    l = _unit(generator, 8)
    l[:, 2] = l[:, 2].abs() + 0.1
    l = F.normalize(l, dim=-1)
    v = n.clone()
    c = torch.full((8, 3), 0.3, dtype=torch.float64)

    value = eval_brdf(l, v, n, c, _constant(8, 0.0), _constant(8, 0.6))

    assert torch.allclose(value, c / math.pi)


def test_lower_hemisphere_is_black() -> None:
    """n.l <= 0 or n.v <= 0 gives exactly zero."""
    n = torch.tensor([[0.0, 0.0, 1.0]] * 3, dtype=torch.float64)
    up = torch.tensor([[0.0, 0.0, 1.0]] * 3, dtype=torch.float64)
    down = torch.tensor([[0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]], dtype=torch.float64)
    c = torch.full((3, 3), 0.5, dtype=torch.float64)

    assert eval_brdf(down, up, n, c, _constant(3, 0.5), _constant(3, 0.3)).abs().sum() == 0.0
    assert eval_brdf(up, down, n, c, _constant(3, 0.5), _constant(3, 0.3)).abs().sum() == 0.0


def test_reciprocity(generator: torch.Generator) -> None:
    """Swapping light and view directions leaves the value unchanged."""
    n = _unit(generator, 64)
    l, v = _unit(generator, 64), _unit(generator, 64)
    c = torch.rand(64, 3, generator=generator, dtype=torch.float64)
    s = torch.rand(64, generator=generator, dtype=torch.float64)
    rho = ROUGHNESS_MIN + (1.0 - ROUGHNESS_MIN) * torch.rand(
        64, generator=generator, dtype=torch.float64
    )

    forward = eval_brdf(l, v, n, c, s, rho)
    backward = eval_brdf(v, l, n, c, s, rho)

    assert torch.allclose(forward, backward, rtol=1e-12, atol=0.0)
    assert (forward >= 0.0).all()


def test_gradients_are_finite_at_grazing_angles() -> None:
    """Masked-out samples do not leak NaN gradients."""
    n = torch.tensor([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]], dtype=torch.float64)
    l = torch.tensor([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], dtype=torch.float64)
    c = torch.full((2, 3), 0.5, dtype=torch.float64, requires_grad=True)
    rho = _constant(2, 0.3).requires_grad_(True)

    eval_brdf(l, l, n, c, _constant(2, 0.5), rho).sum().backward()

    assert c.grad is not None and torch.isfinite(c.grad).all()
    assert rho.grad is not None and torch.isfinite(rho.grad).all()


def test_terms() -> None:
    """Individual terms at their boundary values."""
    one = _constant(1, 1.0)
    alpha = _constant(1, 0.5)

    assert ggx_distribution(one, alpha).item() == pytest.approx(1.0 / (math.pi * 0.25))
    assert smith_g1(one, alpha).item() == pytest.approx(1.0)
    assert fresnel_schlick(_constant(1, 0.04), _constant(1, 0.0)).item() == pytest.approx(1.0)
    assert fresnel_schlick(_constant(1, 0.04), one).item() == pytest.approx(0.04)


def _hemisphere_energy(view: torch.Tensor, rho: float, theta_steps: int = 400) -> float:
    """Midpoint quadrature of f(l, v) (n.l) over the upper hemisphere around +z."""
    phi_steps = 2 * theta_steps
    d_theta = 0.5 * math.pi / theta_steps
    d_phi = 2.0 * math.pi / phi_steps
    theta = (torch.arange(theta_steps, dtype=torch.float64) + 0.5) * d_theta
    phi = (torch.arange(phi_steps, dtype=torch.float64) + 0.5) * d_phi
    theta, phi = torch.meshgrid(theta, phi, indexing="ij")
    theta, phi = theta.reshape(-1), phi.reshape(-1)
    l = torch.stack(
        [torch.sin(theta) * torch.cos(phi), torch.sin(theta) * torch.sin(phi), torch.cos(theta)],
        dim=-1,
    )
    count = l.shape[0]
    n = torch.tensor([0.0, 0.0, 1.0], dtype=torch.float64).expand(count, 3)
    v = view.expand(count, 3)
    c = torch.ones(count, 3, dtype=torch.float64)

    f = eval_brdf(l, v, n, c, _constant(count, 0.04), _constant(count, rho))[:, 0]
    weight = torch.cos(theta) * torch.sin(theta) * d_theta * d_phi
    return float((f * weight).sum())


@pytest.mark.parametrize("rho", [0.3, 0.5, 1.0])
@pytest.mark.parametrize("view_angle", [0.0, 0.25 * math.pi])
def test_white_albedo_conserves_energy(rho: float, view_angle: float) -> None:
    """A white diffuse base with dielectric specular reflects at most about all incoming light."""
    view = torch.tensor([math.sin(view_angle), 0.0, math.cos(view_angle)], dtype=torch.float64)

    energy = _hemisphere_energy(view, rho)

    assert 0.99 < energy <= 1.05


def test_specular_peak_grows_as_roughness_drops() -> None:
    """At l = v = n a smoother surface gives a strictly brighter highlight."""
    rho = torch.tensor([1.0, 0.5, 0.2, 0.1, 0.05], dtype=torch.float64)
    count = rho.shape[0]
    n = torch.tensor([0.0, 0.0, 1.0], dtype=torch.float64).expand(count, 3)
    c = torch.zeros(count, 3, dtype=torch.float64)

    peak = eval_brdf(n, n, n, c, _constant(count, 0.04), rho)[:, 0]

    assert (peak[1:] > peak[:-1]).all()
