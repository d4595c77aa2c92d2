"""
Render settings shared by the volume renderer and the surface tracer.
"""

from typing import Optional

from pydantic import Field, model_validator

from hybrid_inverse_render.utils import BaseConfigModel, ErrorSeverity, ValidationException

BETA_MIN = 1e-4
MIN_SAMPLES_PER_RAY = 8


class RenderConfig(BaseConfigModel):
    """Volume and surface rendering parameters.

    Attributes:
        samples_per_ray (int): Stratified samples inside the cube interval
        density_alpha (Optional[float]): Fixed density scale, None means 1 / beta
        density_beta (float): Initial Laplace scale, learnable while fitting
        near (float): Minimum ray depth
        far (float): Maximum ray depth
        rng_seed (int): Seed for jittered sampling
        chunk_size (int): Rays evaluated together when rendering full images
        surface_eps (float): Root tolerance of the surface tracer
        trace_step (float): Largest step the surface tracer takes
        max_trace_steps (int): Marching steps before a ray counts as a miss
    """

    samples_per_ray: int = Field(default=64, ge=MIN_SAMPLES_PER_RAY)
    density_alpha: Optional[float] = Field(default=None, gt=0.0)
    density_beta: float = Field(default=0.1, gt=BETA_MIN)
    near: float = Field(default=0.0, ge=0.0)
    far: float = Field(default=10.0, gt=0.0)
    rng_seed: int = Field(default=0, ge=0)
    chunk_size: int = Field(default=4096, gt=0)
    surface_eps: float = Field(default=1e-4, gt=0.0)
    trace_step: float = Field(default=1.0 / 64.0, gt=0.0)
    max_trace_steps: int = Field(default=512, gt=0)

    @model_validator(mode="after")
    def validate_clip_range(self) -> "RenderConfig":
        """Ensure the near plane lies in front of the far plane."""
        if self.near >= self.far:
            raise ValidationException(
                message=f"render.near ({self.near}) must be smaller than render.far ({self.far})",
                user_message="The near clip distance must be smaller than the far clip distance.",
                severity=ErrorSeverity.ERROR,
            )
        return self
