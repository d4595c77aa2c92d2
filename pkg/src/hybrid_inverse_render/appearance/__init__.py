"""
Subpackage for appearance: the reflectance model, the spatially varying
reflectance field and the combined flash + ambient light.
"""

from hybrid_inverse_render.appearance.brdf import (
    ROUGHNESS_MIN,
    eval_brdf,
    fresnel_schlick,
    ggx_distribution,
    smith_g1,
    specular_lobe,
)
from hybrid_inverse_render.appearance.lighting import (
    DEFAULT_FLASH_SCALE,
    DEFAULT_K00,
    SH_COEFFICIENTS,
    CombinedLight,
    ViewIndex,
    ambient_shading,
    clamped_sh_basis,
    flash_color_tuple,
    flash_shading,
    light_from_dict,
    light_to_dict,
    linear_ambient_shading,
    load_light,
    save_light,
    sh_basis,
    shade,
)
from hybrid_inverse_render.appearance.reflectance import (
    REFLECTANCE_CHANNELS,
    EyePrior,
    Material,
    ReflectanceField,
    material_at,
)

__all__ = [
    "ROUGHNESS_MIN",
    "eval_brdf",
    "fresnel_schlick",
    "ggx_distribution",
    "smith_g1",
    "specular_lobe",
    "DEFAULT_FLASH_SCALE",
    "DEFAULT_K00",
    "SH_COEFFICIENTS",
    "ViewIndex",
    "CombinedLight",
    "ambient_shading",
    "clamped_sh_basis",
    "flash_color_tuple",
    "flash_shading",
    "light_from_dict",
    "light_to_dict",
    "linear_ambient_shading",
    "load_light",
    "save_light",
    "sh_basis",
    "shade",
    "REFLECTANCE_CHANNELS",
    "EyePrior",
    "Material",
    "ReflectanceField",
    "material_at",
]
