"""
Asset export settings.
"""

from typing import Optional

from pydantic import Field

from hybrid_inverse_render.utils import BaseConfigModel

MIN_LATTICE_RESOLUTION = 32
DEFAULT_ISO = 0.001


class ExportConfig(BaseConfigModel):
    """Settings of the extract, cull, component and bake chain.

    Attributes:
        resolution (int): Lattice vertices per axis for marching cubes
        iso (float): Iso level of the extracted surface
        texture_size (int): Width and height of every baked map
        gutter (int): Texels left empty around every chart
        chunk_size (int): Points evaluated per SDF or material query
        visibility_tolerance (Optional[float]): Slack of the occlusion test, None means
            two lattice cells
    """

    resolution: int = Field(default=128, ge=MIN_LATTICE_RESOLUTION)
    iso: float = DEFAULT_ISO
    texture_size: int = Field(default=1024, ge=8)
    gutter: int = Field(default=2, ge=0)
    chunk_size: int = Field(default=65536, gt=0)
    visibility_tolerance: Optional[float] = Field(default=None, gt=0.0)
