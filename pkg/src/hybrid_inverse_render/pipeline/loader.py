"""
This module contains the run configuration models and the function that loads
and validates a run configuration from a JSON file.

The run configuration validates:
- Grid resolutions (at least 2, strictly ascending) and level weights
- Eyeball centres inside the [-1,1]^3 cube and a positive radius
- Flash scale and colour ranges
- The sections owned by the rendering, training, data, export and relight packages

Classes:
    SceneConfig: Grid, eyeball and eye-prior settings of the fitted scene
    LightConfig: Flashlight, ambient and occlusion-mask settings
    RunConfig: Configuration model for an entire run

Functions:
    load_run_config: Load, override and validate a run configuration from a JSON file
"""

import json
from pathlib import Path
from typing import Any, List, Literal, Mapping, Optional, Tuple

import torch
from pydantic import Field, ValidationError, field_validator, model_validator

from hybrid_inverse_render.appearance import DEFAULT_FLASH_SCALE, DEFAULT_K00, EyePrior
from hybrid_inverse_render.data import SyntheticConfig
from hybrid_inverse_render.export import ExportConfig
from hybrid_inverse_render.geometry import DEFAULT_RESOLUTIONS, SphereEyeballs
from hybrid_inverse_render.relight import RelightConfig
from hybrid_inverse_render.rendering import RenderConfig
from hybrid_inverse_render.training import LossConfig, TrainConfig
from hybrid_inverse_render.utils import (
    LOGNAME_CONFIGURATION,
    BaseConfigModel,
    ConfigurationException,
    ErrorSeverity,
    SystemException,
    ValidationException,
    apply_overrides,
    get_logger,
    handle_pydantic_validation_errors,
)

Vector3 = Tuple[float, float, float]

logger = get_logger(LOGNAME_CONFIGURATION)


class SceneConfig(BaseConfigModel):
    """Grid, eyeball and eye-prior settings of the fitted scene.

    Attributes:
        resolutions (List[int]): Vertices per axis of every grid level, ascending
        level_weights (Optional[List[float]]): Per-level weights, all ones if omitted
        r0 (float): Radius of the initial SDF sphere
        eye_left (Vector3): Left eyeball centre
        eye_right (Vector3): Right eyeball centre
        eye_radius (float): Shared eyeball radius
        eye_specular (float): Predefined eye specular albedo s_E
        eye_roughness (float): Predefined eye roughness rho_E
        eyeballs (bool): False fits the holistic scene, one SDF grid with no eyeball spheres
        dtype (str): Floating point type of fitting and rendering
    """

    resolutions: List[int] = Field(default_factory=lambda: list(DEFAULT_RESOLUTIONS))
    level_weights: Optional[List[float]] = None
    r0: float = Field(default=0.5, gt=0.0, lt=1.0)
    eye_left: Vector3 = (-0.17, 0.1, 0.5)
    eye_right: Vector3 = (0.17, 0.1, 0.5)
    eye_radius: float = Field(default=0.08, gt=0.0)
    eye_specular: float = Field(default=0.25, ge=0.0, le=1.0)
    eye_roughness: float = Field(default=0.1, ge=0.04, le=1.0)
    eyeballs: bool = True
    dtype: Literal["float32", "float64"] = "float32"

    @field_validator("resolutions")
    @classmethod
    def validate_resolutions(cls, v: List[int]) -> List[int]:
        """Ensure every level has at least two vertices and levels ascend strictly."""
        if not v or any(r < 2 for r in v) or any(a >= b for a, b in zip(v, v[1:])):
            error_msg = f"Grid resolutions must be >= 2 and strictly ascending, got {v}"
            raise ValidationException(
                message=error_msg,
                user_message=f"{error_msg}, please check the run configuration file",
                severity=ErrorSeverity.ERROR,
            )
        return v

    @field_validator("eye_left", "eye_right")
    @classmethod
    def validate_eye_centre(cls, v: Vector3) -> Vector3:
        """Ensure an eyeball centre lies inside the cube."""
        if any(not -1.0 <= c <= 1.0 for c in v):
            error_msg = f"Eyeball centre {v} lies outside the [-1,1]^3 cube"
            raise ValidationException(
                message=error_msg,
                user_message=f"{error_msg}, please check the run configuration file",
                severity=ErrorSeverity.ERROR,
            )
        return v

    @model_validator(mode="after")
    def validate_level_weights(self) -> "SceneConfig":
        """Ensure there is one weight per level."""
        if self.level_weights is not None and len(self.level_weights) != len(self.resolutions):
            raise ValidationException(
                message=(
                    f"scene.level_weights has {len(self.level_weights)} entries for "
                    f"{len(self.resolutions)} levels"
                ),
                user_message="Give exactly one level weight per grid resolution.",
                severity=ErrorSeverity.ERROR,
            )
        return self

    def torch_dtype(self) -> torch.dtype:
        """The configured torch dtype."""
        return torch.float64 if self.dtype == "float64" else torch.float32

    def eyes(self) -> SphereEyeballs:
        """The eyeball spheres."""
        return SphereEyeballs(self.eye_left, self.eye_right, self.eye_radius)

    def fitted_eyes(self) -> Optional[SphereEyeballs]:
        """Eyeballs of the fitted scene, None for the holistic representation."""
        return self.eyes() if self.eyeballs else None

    def eye_prior(self) -> EyePrior:
        """The predefined eye material."""
        return EyePrior(self.eye_specular, self.eye_roughness)


class LightConfig(BaseConfigModel):
    """Flashlight, ambient and occlusion-mask settings.

    Attributes:
        flash_scale (float): s_L
        flash_color (Vector3): Calibrated c_L, channels in (0, 1]
        ambient_enabled (bool): False keeps only the flashlight
        k00_init (float): Initial constant SH coefficient of every channel
        occlusion_masks (bool): Learn one SH occlusion mask per training view
        learn_flash_scale (bool): Optimise s_L together with the ambient light
    """

    flash_scale: float = Field(default=DEFAULT_FLASH_SCALE, gt=0.0)
    flash_color: Vector3 = (1.0, 1.0, 1.0)
    ambient_enabled: bool = True
    k00_init: float = DEFAULT_K00
    occlusion_masks: bool = False
    learn_flash_scale: bool = False

    @field_validator("flash_color")
    @classmethod
    def validate_flash_color(cls, v: Vector3) -> Vector3:
        """Ensure every colour channel lies in (0, 1]."""
        if any(not 0.0 < c <= 1.0 for c in v):
            error_msg = f"Flash colour channels must lie in (0, 1], got {v}"
            raise ValidationException(
                message=error_msg,
                user_message=f"{error_msg}, please check the run configuration file",
                severity=ErrorSeverity.ERROR,
            )
        return v


class RunConfig(BaseConfigModel):
    """Configuration model for an entire run; every section has defaults.

    Attributes:
        scene (SceneConfig): Fitted scene layout
        light (LightConfig): Light model
        render (RenderConfig): Volume and surface renderer
        train (TrainConfig): Optimisation schedule
        loss (LossConfig): Loss weights of both stages
        synthetic (SyntheticConfig): Synthetic capture generator
        export (ExportConfig): Asset export chain
        relight (RelightConfig): Relighting
    """

    scene: SceneConfig = Field(default_factory=SceneConfig)
    light: LightConfig = Field(default_factory=LightConfig)
    render: RenderConfig = Field(default_factory=RenderConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    loss: LossConfig = Field(default_factory=LossConfig)
    synthetic: SyntheticConfig = Field(default_factory=SyntheticConfig)
    export: ExportConfig = Field(default_factory=ExportConfig)
    relight: RelightConfig = Field(default_factory=RelightConfig)


def read_config_document(config_path: Path) -> Any:
    """Read the raw JSON document of a run configuration file."""
    if not str(config_path).endswith(".json"):
        error_msg = "Configuration file must be a .json file"
        raise ConfigurationException(
            message=f"{error_msg}: {config_path}",
            user_message=f"{error_msg}, please review file name and format",
            severity=ErrorSeverity.FATAL,
        )
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigurationException(
            message=f"Configuration file not found: {config_path}",
            user_message="The configuration file could not be found. Please check the file path.",
            severity=ErrorSeverity.FATAL,
            original_error=e,
        ) from e
    except json.JSONDecodeError as e:
        raise ConfigurationException(
            message=f"Invalid JSON in configuration file: {str(e)} at position {e.pos}",
            user_message="The configuration file contains invalid JSON.",
            severity=ErrorSeverity.FATAL,
            original_error=e,
        ) from e
    except Exception as e:
        raise SystemException(
            message=f"Error reading configuration: {str(e)}",
            user_message="An unexpected error occurred while reading the configuration.",
            severity=ErrorSeverity.FATAL,
            original_error=e,
        ) from e


@handle_pydantic_validation_errors
def load_run_config(
    config_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Load and validate a run configuration, layering dotted-key overrides on top.

    Args:
        config_path: A .json file, or None to start from the model defaults
        overrides: Dotted keys such as ``train.total_iters``; None values are ignored
    """
    data: Any = {} if config_path is None else read_config_document(config_path)
    if not isinstance(data, dict):
        raise ConfigurationException(
            message=f"Configuration root must be a JSON object: {config_path}",
            user_message="The configuration file must contain a JSON object.",
            severity=ErrorSeverity.FATAL,
        )
    try:
        data = apply_overrides(data, overrides or {})
    except KeyError as e:
        raise ConfigurationException(
            message=f"Invalid configuration override: {e}",
            user_message="A command line option does not match the configuration layout.",
            severity=ErrorSeverity.FATAL,
            original_error=e,
        ) from e

    try:
        config = RunConfig(**data)
    except ValidationError as e:
        raise ValidationException(
            message=f"Failed to validate run configuration: {e}",
            user_message=(
                "The run configuration is invalid. "
                "Please check all fields are known and have valid values."
            ),
            severity=ErrorSeverity.FATAL,
            original_error=e,
        ) from e
    logger.info("Loaded run configuration from %s", config_path or "defaults")
    return config
