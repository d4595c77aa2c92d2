"""Tests for the grid-backed reflectance field."""

import pytest
import torch

from hybrid_inverse_render.appearance import (
    ROUGHNESS_MIN,
    EyePrior,
    ReflectanceField,
    material_at,
)
from hybrid_inverse_render.utils import ValidationException


def test_activation_ranges() -> None:
    """Extreme raw values stay inside the bounded ranges."""
    field = ReflectanceField((2,), dtype=torch.float64)
    raw = torch.tensor([[-50.0] * 5, [50.0] * 5, [0.0] * 5], dtype=torch.float64)

    material = field.activate(raw)

    assert material.c.min() >= 0.0 and material.c.max() <= 1.0
    assert material.rho.tolist() == pytest.approx([ROUGHNESS_MIN, 1.0, (1.0 + ROUGHNESS_MIN) / 2])
    assert material.s[2].item() == pytest.approx(0.5)


def test_init_constant(generator: torch.Generator) -> None:
    """Every point activates to the requested material."""
    field = ReflectanceField((3, 5), level_weights=(0.5, 1.0), dtype=torch.float64)
    field.init_constant(c=(0.2, 0.5, 0.8), s=0.3, rho=0.6)
    points = torch.rand(10, 3, generator=generator, dtype=torch.float64) * 2.0 - 1.0

    material = field.sample(points)

    expected_c = torch.tensor([0.2, 0.5, 0.8], dtype=torch.float64).expand(10, 3)
    assert torch.allclose(material.c, expected_c)
    assert torch.allclose(material.s, torch.full((10,), 0.3, dtype=torch.float64))
    assert torch.allclose(material.rho, torch.full((10,), 0.6, dtype=torch.float64))


def test_material_at_uses_eye_prior(eye_prior: EyePrior) -> None:
    """Specular albedo and roughness come from the prior where E wins; albedo is shared."""
    field = ReflectanceField((3,), dtype=torch.float64).init_constant(s=0.05, rho=0.7)
    points = torch.zeros(2, 3, dtype=torch.float64)
    sdf_E = torch.tensor([-0.1, 0.3], dtype=torch.float64)
    sdf_S = torch.tensor([0.2, 0.1], dtype=torch.float64)

    material = material_at(points, field, eye_prior, sdf_E, sdf_S)

    assert material.s.tolist() == pytest.approx([eye_prior.s_E, 0.05])
    assert material.rho.tolist() == pytest.approx([eye_prior.rho_E, 0.7])
    assert torch.allclose(material.c[0], material.c[1])


@pytest.mark.parametrize("s_E,rho_E", [(-0.1, 0.1), (1.2, 0.1), (0.25, 0.0), (0.25, 1.5)])
def test_invalid_eye_prior(s_E: float, rho_E: float) -> None:
    """Eye material values outside their ranges are rejected."""
    with pytest.raises(ValidationException):
        EyePrior(s_E=s_E, rho_E=rho_E)
