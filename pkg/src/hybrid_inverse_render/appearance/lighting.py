"""
Combined lighting: an inverse-square point light co-located with the camera plus
a low-frequency spherical-harmonics ambient term.

Ambient shading used while fitting is wrapped in SoftPlus so it stays
nonnegative, optionally multiplied by a per-view occlusion factor
sigmoid(O_i . Y(n)) that models light blocked by the photographer. Relighting
needs shading that is linear in the coefficients, so it uses the clamped basis
max(Y_j(n), 0) without SoftPlus (:func:`linear_ambient_shading`).

SH ordering (l, m): (0,0) (1,-1) (1,0) (1,1) (2,-2) (2,-1) (2,0) (2,1) (2,2),
real basis without the Condon-Shortley phase.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from hybrid_inverse_render.appearance.brdf import eval_brdf
from hybrid_inverse_render.utils import (
    FLASH_NEAR_SINGULAR,
    LOGNAME_APPEARANCE,
    ConfigurationException,
    DatasetException,
    Diagnostics,
    ErrorSeverity,
    SystemException,
    ValidationException,
    get_logger,
)

SH_COEFFICIENTS = 9
SH_C0 = 0.28209479177387814
SH_C1 = 0.4886025119029199
SH_C2 = 1.0925484305920792
SH_C3 = 0.31539156525252005
SH_C4 = 0.5462742152960396

DEFAULT_FLASH_SCALE = 8.0
DEFAULT_K00 = -8.0
NEAR_SINGULAR_DISTANCE = 1e-6

logger = get_logger(LOGNAME_APPEARANCE)

PathLike = Union[str, Path]
ViewIndex = Union[int, Tensor, None]


def sh_basis(n: Tensor) -> Tensor:
    """Real SH bands 0-2 evaluated at unit directions (N, 3), shape (N, 9)."""
    x, y, z = n[:, 0], n[:, 1], n[:, 2]
    return torch.stack(
        [
            torch.full_like(x, SH_C0),
            SH_C1 * y,
            SH_C1 * z,
            SH_C1 * x,
            SH_C2 * x * y,
            SH_C2 * y * z,
            SH_C3 * (3.0 * z * z - 1.0),
            SH_C2 * x * z,
            SH_C4 * (x * x - y * y),
        ],
        dim=-1,
    )


def clamped_sh_basis(n: Tensor) -> Tensor:
    """max(Y_j(n), 0) per basis function, shape (N, 9)."""
    return sh_basis(n).clamp_min(0.0)


def linear_ambient_shading(c: Tensor, n: Tensor, weights: Tensor) -> Tensor:
    """Ambient radiance c * sum_j w_j max(Y_j(n), 0), linear in ``weights`` (9, 3)."""
    return c * (clamped_sh_basis(n) @ weights.to(c.dtype))


class CombinedLight(nn.Module):
    """Flashlight plus SH ambient with optional per-view occlusion masks.

    Attributes:
        flash_scale: Scalar s_L; trainable when ``learn_flash_scale`` is set.
        flash_color: Buffer c_L (3,), channels in (0, 1].
        ambient: Parameter K (9, 3), SH coefficients per colour channel.
        occlusion: Parameter O (views, 9) or None when masks are disabled.
        view_ids: Frame id for every occlusion row.
        ambient_enabled: False drops the ambient term entirely.
    """

    def __init__(
        self,
        flash_scale: float = DEFAULT_FLASH_SCALE,
        flash_color: Sequence[float] = (1.0, 1.0, 1.0),
        ambient_enabled: bool = True,
        k00_init: float = DEFAULT_K00,
        view_ids: Optional[Sequence[str]] = None,
        learn_flash_scale: bool = False,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        super().__init__()
        if flash_scale < 0.0:
            raise ValidationException(
                message=f"Flash scale s_L must be nonnegative, got {flash_scale}",
                severity=ErrorSeverity.ERROR,
            )
        if len(flash_color) != 3 or any(not 0.0 < ch <= 1.0 for ch in flash_color):
            raise ValidationException(
                message=f"Flash colour channels must lie in (0, 1], got {list(flash_color)}",
                severity=ErrorSeverity.ERROR,
            )
        self.flash_scale = nn.Parameter(
            torch.tensor(float(flash_scale), dtype=dtype), requires_grad=learn_flash_scale
        )
        self.register_buffer("flash_color", torch.tensor(list(flash_color), dtype=dtype))
        ambient = torch.zeros(SH_COEFFICIENTS, 3, dtype=dtype)
        ambient[0] = k00_init
        self.ambient = nn.Parameter(ambient)
        self.ambient_enabled = ambient_enabled
        self.view_ids = list(view_ids) if view_ids is not None else []
        self.occlusion: Optional[nn.Parameter] = (
            nn.Parameter(torch.zeros(len(self.view_ids), SH_COEFFICIENTS, dtype=dtype))
            if view_ids is not None
            else None
        )

    @property
    def occlusion_enabled(self) -> bool:
        """True when per-view occlusion masks are modelled."""
        return self.occlusion is not None

    def flash_intensity(self) -> Tensor:
        """L = s_L * c_L, shape (3,)."""
        return self.flash_scale * self.flash_color

    def occlusion_factor(self, n: Tensor, view_index: ViewIndex) -> Optional[Tensor]:
        """sigmoid(O_i . Y(n)) (N,), or None when no mask applies to this render.

        ``view_index`` is one index for the whole batch or one per point.
        """
        if self.occlusion is None or view_index is None:
            return None
        n_views = self.occlusion.shape[0]
        indices = torch.as_tensor(view_index, dtype=torch.long)
        if indices.numel() == 0 or int(indices.min()) < 0 or int(indices.max()) >= n_views:
            raise ConfigurationException(
                message=(
                    f"View index {view_index} has no occlusion coefficients "
                    f"({n_views} views configured)"
                ),
                user_message="Occlusion masks are enabled but missing for the requested view.",
            )
        coefficients = self.occlusion.to(n.dtype)[indices]
        if coefficients.dim() == 1:
            return torch.sigmoid(sh_basis(n) @ coefficients)
        return torch.sigmoid((sh_basis(n) * coefficients).sum(dim=-1))

    def ambient_shading(self, c: Tensor, n: Tensor, view_index: ViewIndex = None) -> Tensor:
        """c * [O_i(n)] * SoftPlus(K . Y(n)) per channel, shape (N, 3)."""
        if not self.ambient_enabled:
            return torch.zeros_like(c)
        irradiance = F.softplus(sh_basis(n) @ self.ambient.to(n.dtype))
        mask = self.occlusion_factor(n, view_index)
        if mask is not None:
            irradiance = irradiance * mask[:, None]
        return c * irradiance

    def flash_shading(
        self, x: Tensor, o: Tensor, n: Tensor, c: Tensor, s: Tensor, rho: Tensor
    ) -> Tensor:
        """Radiance from the co-located flash at ``o`` reflected towards ``o``, shape (N, 3)."""
        offset = o.to(x.dtype) - x
        distance = offset.norm(dim=-1)
        near = distance < NEAR_SINGULAR_DISTANCE
        Diagnostics.increment(FLASH_NEAR_SINGULAR, int(near.sum()))
        safe_distance = torch.where(near, torch.ones_like(distance), distance)
        v = offset / safe_distance[:, None]
        cosine = (n * v).sum(dim=-1).clamp_min(0.0)
        falloff = cosine / (safe_distance * safe_distance)
        radiance = self.flash_intensity().to(x.dtype) * eval_brdf(v, v, n, c, s, rho)
        radiance = radiance * falloff[:, None]
        return torch.where(near[:, None], torch.zeros_like(radiance), radiance)

    def shade(
        self,
        x: Tensor,
        o: Tensor,
        n: Tensor,
        c: Tensor,
        s: Tensor,
        rho: Tensor,
        view_index: ViewIndex = None,
    ) -> Tensor:
        """Outgoing radiance l_flash + l_amb, shape (N, 3)."""
        return self.flash_shading(x, o, n, c, s, rho) + self.ambient_shading(c, n, view_index)


def ambient_shading(
    c: Tensor, n: Tensor, light: CombinedLight, view_index: ViewIndex = None
) -> Tensor:
    """Functional form of :meth:`CombinedLight.ambient_shading`."""
    return light.ambient_shading(c, n, view_index)


def flash_shading(
    x: Tensor, o: Tensor, n: Tensor, c: Tensor, s: Tensor, rho: Tensor, light: CombinedLight
) -> Tensor:
    """Functional form of :meth:`CombinedLight.flash_shading`."""
    return light.flash_shading(x, o, n, c, s, rho)


def shade(
    x: Tensor,
    o: Tensor,
    n: Tensor,
    c: Tensor,
    s: Tensor,
    rho: Tensor,
    light: CombinedLight,
    view_index: ViewIndex = None,
) -> Tensor:
    """Functional form of :meth:`CombinedLight.shade`."""
    return light.shade(x, o, n, c, s, rho, view_index)


def light_to_dict(light: CombinedLight) -> Dict[str, Any]:
    """Text key-value form of the light state."""
    state: Dict[str, Any] = {
        "s_L": float(light.flash_scale.detach()),
        "c_L": [float(v) for v in light.flash_color],
        "ambient_enabled": light.ambient_enabled,
        "K": [[float(v) for v in row] for row in light.ambient.detach()],
    }
    if light.occlusion is not None:
        state["occlusion"] = {
            frame_id: [float(v) for v in row]
            for frame_id, row in zip(light.view_ids, light.occlusion.detach())
        }
    return state


def light_from_dict(
    state: Dict[str, Any],
    learn_flash_scale: bool = False,
    dtype: torch.dtype = torch.float32,
    source: str = "<light>",
) -> CombinedLight:
    """Rebuild a :class:`CombinedLight` from :func:`light_to_dict` output."""
    try:
        occlusion: Optional[Dict[str, Sequence[float]]] = state.get("occlusion")
        light = CombinedLight(
            flash_scale=float(state["s_L"]),
            flash_color=tuple(float(v) for v in state["c_L"]),
            ambient_enabled=bool(state.get("ambient_enabled", True)),
            view_ids=list(occlusion) if occlusion is not None else None,
            learn_flash_scale=learn_flash_scale,
            dtype=dtype,
        )
        ambient = torch.tensor(state["K"], dtype=dtype)
        if ambient.shape != (SH_COEFFICIENTS, 3):
            raise ValueError(f"K must be 9x3, got {tuple(ambient.shape)}")
        with torch.no_grad():
            light.ambient.copy_(ambient)
            if light.occlusion is not None and occlusion is not None:
                light.occlusion.copy_(torch.tensor(list(occlusion.values()), dtype=dtype))
    except (KeyError, TypeError, ValueError, RuntimeError) as e:
        raise DatasetException(
            message=f"Malformed light state in {source}: {e}",
            user_message=f"The light file {source} is malformed.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return light


def save_light(light: CombinedLight, path: PathLike) -> Path:
    """Write the light state as JSON."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(light_to_dict(light), indent=2), encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write light state {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    logger.info("Wrote light state %s", path)
    return path


def load_light(
    path: PathLike, learn_flash_scale: bool = False, dtype: torch.dtype = torch.float32
) -> CombinedLight:
    """Read a light state written by :func:`save_light`."""
    path = Path(path)
    try:
        state = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"Light state not found: {path}",
            user_message=f"The light file {path} does not exist.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    except json.JSONDecodeError as e:
        raise DatasetException(
            message=f"Invalid JSON in light state {path}: {e}",
            user_message=f"The light file {path} is not valid JSON.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return light_from_dict(
        state, learn_flash_scale=learn_flash_scale, dtype=dtype, source=str(path)
    )


def flash_color_tuple(light: CombinedLight) -> Tuple[float, float, float]:
    """c_L as a plain tuple."""
    r, g, b = (float(v) for v in light.flash_color)
    return (r, g, b)
