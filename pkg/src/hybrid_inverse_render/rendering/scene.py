"""
The renderable hybrid scene: geometry, a material source and the density.

Fitted scenes draw materials from a :class:`ReflectanceField` plus the eye
prior; the synthetic ground truth plugs in its own analytic materials through
the same :class:`MaterialSource` protocol. Grid-backed scenes persist as a
directory holding ``sdf.hirg``, ``reflectance.hirr`` and ``scene.json``.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Protocol, Sequence, Tuple, Union

import torch
from torch import Tensor, nn

from hybrid_inverse_render.appearance import EyePrior, Material, ReflectanceField, material_at
from hybrid_inverse_render.geometry import (
    REFLECTANCE_GRID_MAGIC,
    SDF_GRID_MAGIC,
    HybridGeometry,
    SamplePoints,
    SdfGridField,
    SphereEyeballs,
    load_grid_into,
    read_grid_file,
    save_grid,
)
from hybrid_inverse_render.rendering.density import LaplaceDensity
from hybrid_inverse_render.utils import (
    LOGNAME_RENDERING,
    DatasetException,
    ErrorSeverity,
    SystemException,
    get_logger,
)

SDF_FILENAME = "sdf.hirg"
REFLECTANCE_FILENAME = "reflectance.hirr"
SCENE_FILENAME = "scene.json"

logger = get_logger(LOGNAME_RENDERING)

PathLike = Union[str, Path]


class MaterialSource(Protocol):
    """Anything that can provide BRDF parameters at sample points."""

    def material(self, points: Tensor, sdf_E: Tensor, sdf_S: Tensor) -> Material:
        """Material (c, s, rho) at ``points`` given both component SDFs."""


class FieldMaterials(nn.Module):
    """Reflectance grid for the skin region and shared albedo, eye prior for E."""

    def __init__(self, reflectance: ReflectanceField, prior: EyePrior) -> None:
        super().__init__()
        self.reflectance = reflectance
        self.prior = prior

    def material(self, points: Tensor, sdf_E: Tensor, sdf_S: Tensor) -> Material:
        return material_at(points, self.reflectance, self.prior, sdf_E, sdf_S)


class HybridScene(nn.Module):
    """Geometry, materials and density rendered together."""

    def __init__(
        self, geometry: HybridGeometry, materials: MaterialSource, density: LaplaceDensity
    ) -> None:
        super().__init__()
        self.geometry = geometry
        self.materials = materials
        self.density = density

    @property
    def dtype(self) -> torch.dtype:
        """Floating point type used for evaluation."""
        return self.density.raw_beta.dtype

    def sdf(self, points: Tensor) -> Tensor:
        """Union SDF at ``points``."""
        return self.geometry.sdf(points)

    def sample(self, points: Tensor) -> Tuple[SamplePoints, Material]:
        """Geometry record and material at ``points``."""
        record = self.geometry.evaluate(points)
        return record, self.materials.material(points, record.sdf_E, record.sdf_S)

    def geometry_parameters(self) -> Sequence[nn.Parameter]:
        """Parameters frozen in the surface-rendering stage (SDF grid and beta)."""
        params = [p for p in self.geometry.parameters()]
        return [*params, self.density.raw_beta]

    def appearance_parameters(self) -> Sequence[nn.Parameter]:
        """Parameters of the material source."""
        if isinstance(self.materials, nn.Module):
            return list(self.materials.parameters())
        return []


def build_grid_scene(
    resolutions: Sequence[int],
    eyes: Optional[SphereEyeballs],
    prior: EyePrior,
    r0: float = 0.5,
    beta: float = 0.1,
    alpha: Union[float, None] = None,
    level_weights: Union[Sequence[float], None] = None,
    dtype: torch.dtype = torch.float32,
) -> HybridScene:
    """Fresh fitting scene: sphere-initialised SDF grid, constant reflectance.

    ``eyes=None`` builds the holistic scene where the grid alone holds the eyes.
    """
    field = SdfGridField(resolutions, level_weights=level_weights, dtype=dtype).init_sphere(r0)
    reflectance = ReflectanceField(resolutions, level_weights=level_weights, dtype=dtype)
    reflectance.init_constant()
    return HybridScene(
        HybridGeometry(field, eyes),
        FieldMaterials(reflectance, prior),
        LaplaceDensity(beta=beta, alpha=alpha, dtype=dtype),
    )


def _grid_parts(scene: HybridScene) -> Tuple[SdfGridField, FieldMaterials]:
    field = scene.geometry.field
    materials = scene.materials
    if not isinstance(field, SdfGridField) or not isinstance(materials, FieldMaterials):
        raise SystemException(
            message="Only grid-backed scenes can be written as snapshots",
            user_message="This scene has no grid representation to save.",
            severity=ErrorSeverity.ERROR,
        )
    return field, materials


def scene_to_dict(scene: HybridScene) -> Dict[str, Any]:
    """Scalar scene state stored next to the grid snapshots."""
    field, materials = _grid_parts(scene)
    eyes = scene.geometry.eyes
    return {
        "resolutions": list(field.resolutions),
        "level_weights": [float(w) for w in field.level_weights],
        "eyes": (
            None if eyes is None else {"p_l": list(eyes.p_l), "p_r": list(eyes.p_r), "r": eyes.r}
        ),
        "eye_prior": {"s_E": materials.prior.s_E, "rho_E": materials.prior.rho_E},
        "beta": float(scene.density.beta().detach()),
        "alpha": scene.density.fixed_alpha,
        "rho_min": materials.reflectance.rho_min,
    }


def save_scene(scene: HybridScene, directory: PathLike) -> Path:
    """Write the grid snapshots and ``scene.json`` into ``directory``."""
    directory = Path(directory)
    field, materials = _grid_parts(scene)
    save_grid(field, directory / SDF_FILENAME, SDF_GRID_MAGIC)
    save_grid(materials.reflectance, directory / REFLECTANCE_FILENAME, REFLECTANCE_GRID_MAGIC)
    try:
        (directory / SCENE_FILENAME).write_text(
            json.dumps(scene_to_dict(scene), indent=2), encoding="utf-8"
        )
    except OSError as e:
        raise SystemException(
            message=f"Failed to write {directory / SCENE_FILENAME}: {e}",
            user_message=f"Unable to write the scene into {directory}.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    logger.info("Saved scene snapshot to %s", directory)
    return directory


def load_scene(directory: PathLike, dtype: torch.dtype = torch.float32) -> HybridScene:
    """Rebuild a grid-backed scene saved by :func:`save_scene`."""
    directory = Path(directory)
    scene_file = directory / SCENE_FILENAME
    try:
        state = json.loads(scene_file.read_text(encoding="utf-8"))
        eyes_state = state["eyes"]
        eyes = (
            None
            if eyes_state is None
            else SphereEyeballs(
                tuple(eyes_state["p_l"]), tuple(eyes_state["p_r"]), float(eyes_state["r"])
            )
        )
        prior = EyePrior(float(state["eye_prior"]["s_E"]), float(state["eye_prior"]["rho_E"]))
        resolutions = [int(r) for r in state["resolutions"]]
        weights = [float(w) for w in state["level_weights"]]
        beta = float(state["beta"])
        alpha = state.get("alpha")
        rho_min = float(state.get("rho_min", 0.04))
    except FileNotFoundError as e:
        raise DatasetException(
            message=f"Scene description not found: {scene_file}",
            user_message=f"{directory} does not contain a fitted scene.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DatasetException(
            message=f"Malformed scene description {scene_file}: {e}",
            user_message=f"The scene description in {directory} is corrupted.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e

    field = SdfGridField(resolutions, level_weights=weights, dtype=dtype)
    load_grid_into(field, directory / SDF_FILENAME, SDF_GRID_MAGIC)
    refl_resolutions, refl_weights, _, _ = read_grid_file(
        directory / REFLECTANCE_FILENAME, REFLECTANCE_GRID_MAGIC
    )
    reflectance = ReflectanceField(
        refl_resolutions, level_weights=refl_weights, rho_min=rho_min, dtype=dtype
    )
    load_grid_into(reflectance, directory / REFLECTANCE_FILENAME, REFLECTANCE_GRID_MAGIC)
    density = LaplaceDensity(beta=beta, alpha=alpha, dtype=dtype)
    logger.info("Loaded scene snapshot from %s", directory)
    return HybridScene(HybridGeometry(field, eyes), FieldMaterials(reflectance, prior), density)
