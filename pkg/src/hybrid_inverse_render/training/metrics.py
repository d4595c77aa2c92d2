"""
Evaluation metrics for fitted scenes: PSNR, masked albedo errors and region
separation of the per-region opacities.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.data import CaptureDataset, Label
from hybrid_inverse_render.rendering import (
    HybridScene,
    ImageRender,
    RenderConfig,
    render_image,
    render_surface_image,
    to_numpy,
)

MAX_PSNR = 100.0


def psnr(rendered: np.ndarray, target: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    """Peak signal-to-noise ratio for values in [0, 1], optionally over masked pixels."""
    diff = (np.asarray(rendered, np.float64) - np.asarray(target, np.float64)) ** 2
    if mask is not None:
        diff = diff[np.asarray(mask, bool)]
    if diff.size == 0:
        return MAX_PSNR
    mse = float(diff.mean())
    if mse <= 0.0:
        return MAX_PSNR
    return min(MAX_PSNR, -10.0 * math.log10(mse))


def masked_mae(estimate: np.ndarray, reference: np.ndarray, mask: np.ndarray) -> float:
    """Mean absolute error over masked pixels (all channels); 0 for an empty mask."""
    selected = np.asarray(mask, bool)
    if not selected.any():
        return 0.0
    diff = np.abs(np.asarray(estimate, np.float64) - np.asarray(reference, np.float64))
    return float(diff[selected].mean())


def region_separation(
    opacity_E: np.ndarray, labels: np.ndarray, eye_min: float = 0.9, skin_max: float = 0.05
) -> Dict[str, float]:
    """Fraction of eye pixels with opacity_E >= eye_min and of skin pixels with <= skin_max."""
    eye = labels == int(Label.EYE)
    skin = labels == int(Label.SKIN)
    return {
        "eye_fraction": float((opacity_E[eye] >= eye_min).mean()) if eye.any() else 1.0,
        "skin_fraction": float((opacity_E[skin] <= skin_max).mean()) if skin.any() else 1.0,
    }


@dataclass
class ViewMetrics:
    """Metrics of one evaluated view."""

    frame_id: str
    psnr: float
    l1: float
    albedo_mae: Optional[float] = None
    specular_mae: Optional[float] = None
    eye_fraction: float = 1.0
    skin_fraction: float = 1.0


@dataclass
class EvaluationReport:
    """Per-view metrics and their means."""

    views: List[ViewMetrics] = field(default_factory=list)

    def summary(self) -> Dict[str, float]:
        """Means over the evaluated views."""
        if not self.views:
            return {}
        result = {
            "psnr": float(np.mean([v.psnr for v in self.views])),
            "l1": float(np.mean([v.l1 for v in self.views])),
            "eye_fraction": float(np.mean([v.eye_fraction for v in self.views])),
            "skin_fraction": float(np.mean([v.skin_fraction for v in self.views])),
        }
        albedo = [v.albedo_mae for v in self.views if v.albedo_mae is not None]
        specular = [v.specular_mae for v in self.views if v.specular_mae is not None]
        if albedo:
            result["albedo_mae"] = float(np.mean(albedo))
        if specular:
            result["specular_mae"] = float(np.mean(specular))
        return result


def evaluate_views(
    dataset: CaptureDataset,
    indices: Sequence[int],
    scene: HybridScene,
    light: CombinedLight,
    config: RenderConfig,
    k: float = 1.0,
    surface: bool = True,
) -> EvaluationReport:
    """Render the given frames without occlusion masks and compare them to the captures.

    Albedo errors are measured inside the skin mask against ground-truth albedo
    when the dataset carries it; the specular error compares k * s against the
    pseudo specular map on skin pixels.
    """
    report = EvaluationReport()
    for index in indices:
        frame = dataset.frames[index]
        with torch.no_grad():
            render: ImageRender = (
                render_surface_image(frame.camera, scene, light, config)
                if surface
                else render_image(frame.camera, scene, light, config)
            )
        rgb = to_numpy(render.rgb)
        skin = frame.labels == int(Label.SKIN)
        separation = region_separation(to_numpy(render.opacity_E), frame.labels)
        report.views.append(
            ViewMetrics(
                frame_id=frame.frame_id,
                psnr=psnr(np.clip(rgb, 0.0, 1.0), np.clip(frame.image, 0.0, 1.0)),
                l1=float(np.abs(rgb - frame.image).mean()),
                albedo_mae=(
                    masked_mae(to_numpy(render.albedo), frame.albedo, skin)
                    if frame.albedo is not None
                    else None
                ),
                specular_mae=masked_mae(k * to_numpy(render.specular), frame.pseudo_spec, skin),
                eye_fraction=separation["eye_fraction"],
                skin_fraction=separation["skin_fraction"],
            )
        )
    return report
