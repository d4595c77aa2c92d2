"""
Physically based reflectance: Lambertian diffuse plus a GGX microfacet specular
lobe with Smith shadowing and Schlick Fresnel, where the specular albedo s acts
as the Fresnel reflectance at normal incidence and alpha = rho^2.

All functions take batched tensors: directions (N, 3), albedo (N, 3), specular
albedo and roughness (N,). Output is reflectance per steradian, (N, 3).
"""

import math

import torch
from torch import Tensor

ROUGHNESS_MIN = 0.04


def ggx_distribution(n_dot_h: Tensor, alpha: Tensor) -> Tensor:
    """GGX normal distribution D."""
    a2 = alpha * alpha
    denom = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0
    return a2 / (math.pi * denom * denom)


def smith_g1(n_dot_x: Tensor, alpha: Tensor) -> Tensor:
    """Separable Smith masking term for one direction."""
    a2 = alpha * alpha
    return 2.0 * n_dot_x / (n_dot_x + torch.sqrt(a2 + (1.0 - a2) * n_dot_x * n_dot_x))


def fresnel_schlick(f0: Tensor, cos_theta: Tensor) -> Tensor:
    """Schlick's Fresnel approximation."""
    return f0 + (1.0 - f0) * (1.0 - cos_theta) ** 5


def specular_lobe(l: Tensor, v: Tensor, n: Tensor, s: Tensor, rho: Tensor) -> Tensor:
    """D * G * F / (4 (n.l)(n.v)), zero outside the upper hemisphere, shape (N,)."""
    n_dot_l = (n * l).sum(dim=-1)
    n_dot_v = (n * v).sum(dim=-1)
    valid = (n_dot_l > 0.0) & (n_dot_v > 0.0)
    # placeholders keep the masked-out branch finite for autograd
    safe_nl = torch.where(valid, n_dot_l, torch.ones_like(n_dot_l))
    safe_nv = torch.where(valid, n_dot_v, torch.ones_like(n_dot_v))

    half = l + v
    half_length = half.norm(dim=-1, keepdim=True)
    half = half / torch.where(half_length > 0.0, half_length, torch.ones_like(half_length))
    n_dot_h = (n * half).sum(dim=-1).clamp(0.0, 1.0)
    # l.h == v.h analytically; averaging keeps l <-> v swaps bit-exact
    h_dot_dir = (0.5 * ((l * half).sum(dim=-1) + (v * half).sum(dim=-1))).clamp(0.0, 1.0)

    alpha = rho * rho
    d = ggx_distribution(n_dot_h, alpha)
    g = smith_g1(safe_nl, alpha) * smith_g1(safe_nv, alpha)
    f = fresnel_schlick(s, h_dot_dir)
    lobe = d * g * f / (4.0 * safe_nl * safe_nv)
    return torch.where(valid, lobe.clamp_min(0.0), torch.zeros_like(lobe))


def eval_brdf(l: Tensor, v: Tensor, n: Tensor, c: Tensor, s: Tensor, rho: Tensor) -> Tensor:
    """Diffuse c/pi plus the specular lobe; zero whenever n.l <= 0 or n.v <= 0."""
    n_dot_l = (n * l).sum(dim=-1)
    n_dot_v = (n * v).sum(dim=-1)
    valid = ((n_dot_l > 0.0) & (n_dot_v > 0.0))[:, None]
    value = c / math.pi + specular_lobe(l, v, n, s, rho)[:, None]
    return torch.where(valid, value.clamp_min(0.0), torch.zeros_like(value))
