"""
Training and loss configuration models.

Defaults reproduce the full-length schedule: 40000 iterations, the first 30000
with volume rendering and every loss, learning rate 1e-3 annealed by 0.3 every
15000 iterations. Desk-scale presets shrink the counts proportionally.
"""

from enum import IntEnum
from typing import Optional

from pydantic import Field, model_validator

from hybrid_inverse_render.utils import BaseConfigModel, ErrorSeverity, ValidationException


class Stage(IntEnum):
    """Training stage: volume rendering with all losses, then surface rendering."""

    ONE = 1
    TWO = 2


class LossWeights(BaseConfigModel):
    """Weights of every loss term for one stage.

    Attributes:
        w_l1 (float): Photometric L1
        w_mask (float): Opacity against the foreground mask
        w_eikonal (float): Eikonal regulariser
        w_eps_hair (float): Normal smoothness on hair rays
        w_eps_other (float): Normal smoothness on every other ray
        w_comp (float): Per-region opacity (composition) loss
        w_ref (float): Reflectance regularisation against pseudo specular maps
    """

    w_l1: float = Field(default=1.0, ge=0.0)
    w_mask: float = Field(default=1.0, ge=0.0)
    w_eikonal: float = Field(default=1.0, ge=0.0)
    w_eps_hair: float = Field(default=0.5, ge=0.0)
    w_eps_other: float = Field(default=0.02, ge=0.0)
    w_comp: float = Field(default=1.0, ge=0.0)
    w_ref: float = Field(default=0.5, ge=0.0)

    @classmethod
    def for_stage(cls, stage: Stage) -> "LossWeights":
        """Default weights of ``stage``."""
        if stage == Stage.ONE:
            return cls()
        return cls(
            w_l1=1.0,
            w_mask=0.0,
            w_eikonal=0.0,
            w_eps_hair=0.0,
            w_eps_other=0.0,
            w_comp=0.0,
            w_ref=0.01,
        )

    def is_zero(self) -> bool:
        """True when every weight is zero."""
        return not any(value > 0.0 for value in self.model_dump().values())


class LossConfig(BaseConfigModel):
    """Loss weights per stage and the normal-smoothness radius.

    Attributes:
        stage_one (LossWeights): Weights while volume rendering
        stage_two (LossWeights): Weights while surface rendering; geometry terms are ignored
        normal_eps (Optional[float]): Perturbation radius, None means half the finest voxel
    """

    stage_one: LossWeights = Field(default_factory=lambda: LossWeights.for_stage(Stage.ONE))
    stage_two: LossWeights = Field(default_factory=lambda: LossWeights.for_stage(Stage.TWO))
    normal_eps: Optional[float] = Field(default=None, gt=0.0)

    def weights(self, stage: Stage) -> LossWeights:
        """Weights of ``stage``."""
        return self.stage_one if stage == Stage.ONE else self.stage_two


class TrainConfig(BaseConfigModel):
    """Optimisation schedule; every field has a matching ``fit`` command line flag.

    Attributes:
        total_iters (int): Optimisation steps across both stages
        stage1_iters (int): Steps of volume rendering before switching to surfaces
        lr0 (float): Initial learning rate
        lr_decay_factor (float): Multiplicative learning-rate decay
        lr_decay_every (int): Steps between decays
        rays_per_batch (int): Rays sampled per step
        adam_beta1 (float): First-moment decay
        adam_beta2 (float): Second-moment decay
        adam_eps (float): Denominator epsilon
        seed (int): Seed of ray sampling and jitter
        log_every (int): Steps between INFO progress lines
        snapshot_every (int): Steps between snapshots, 0 disables them
        holdout_every (int): Every n-th frame is held out for evaluation, 0 disables
        divergence_factor (float): Abort threshold relative to the first loss
        divergence_patience (int): Consecutive steps above the threshold before aborting
    """

    total_iters: int = Field(default=40000, ge=0)
    stage1_iters: int = Field(default=30000, ge=0)
    lr0: float = Field(default=1e-3, gt=0.0)
    lr_decay_factor: float = Field(default=0.3, gt=0.0, le=1.0)
    lr_decay_every: int = Field(default=15000, gt=0)
    rays_per_batch: int = Field(default=512, gt=0)
    adam_beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    seed: int = Field(default=0, ge=0)
    log_every: int = Field(default=100, gt=0)
    snapshot_every: int = Field(default=0, ge=0)
    holdout_every: int = Field(default=4, ge=0)
    divergence_factor: float = Field(default=10.0, gt=1.0)
    divergence_patience: int = Field(default=100, gt=0)

    @model_validator(mode="after")
    def validate_stage_split(self) -> "TrainConfig":
        """Ensure the first stage fits inside the schedule."""
        if self.stage1_iters > self.total_iters:
            raise ValidationException(
                message=(
                    f"train.stage1_iters ({self.stage1_iters}) exceeds "
                    f"train.total_iters ({self.total_iters})"
                ),
                user_message="stage1_iters must not be larger than total_iters.",
                severity=ErrorSeverity.ERROR,
            )
        return self
