"""
Relighting settings.
"""

from pydantic import Field

from hybrid_inverse_render.utils import BaseConfigModel

DEFAULT_RATIO_FLOOR = 1e-3


class RelightConfig(BaseConfigModel):
    """Settings of the SH solve and ratio-image relighting.

    Attributes:
        ratio_floor (float): Smallest source radiance a ratio divides by, linear units
        mask_threshold (float): Opacity above which a pixel enters the SH solve
    """

    ratio_floor: float = Field(default=DEFAULT_RATIO_FLOOR, gt=0.0)
    mask_threshold: float = Field(default=0.5, ge=0.0, lt=1.0)
