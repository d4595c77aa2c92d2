"""
Finite-difference check of the analytic (autograd) gradients of the training
objective.

A small float64 scene is perturbed at random, a fixed batch of rays is rendered
and the stage-one and stage-two objectives are differentiated. For a random
subset of coordinates of every parameter group the analytic gradient is
compared with a central difference.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import torch
from torch import Tensor, nn

from hybrid_inverse_render.appearance import CombinedLight, EyePrior
from hybrid_inverse_render.data import Label
from hybrid_inverse_render.geometry import SphereEyeballs
from hybrid_inverse_render.rendering import HybridScene, RenderConfig, build_grid_scene
from hybrid_inverse_render.training.config import LossConfig, Stage
from hybrid_inverse_render.training.losses import LossInputs, ScaleCompensator, total_loss
from hybrid_inverse_render.training.trainer import (
    RayBatch,
    parameter_groups,
    smoothness_eps,
    stage_one_inputs,
    stage_two_inputs,
)
from hybrid_inverse_render.utils import LOGNAME_TRAINING, get_logger

logger = get_logger(LOGNAME_TRAINING)

DEFAULT_STEP = 1e-6
DEFAULT_TOLERANCE = 1e-3
RELATIVE_FLOOR = 1e-4
GRADCHECK_RESOLUTIONS = (8, 16)


@dataclass
class GradientSample:
    """One checked coordinate."""

    stage: int
    group: str
    index: int
    analytic: float
    numeric: float

    @property
    def relative_error(self) -> float:
        """|a - n| / max(|a|, |n|, floor)."""
        scale = max(abs(self.analytic), abs(self.numeric), RELATIVE_FLOOR)
        return abs(self.analytic - self.numeric) / scale


@dataclass
class GradcheckReport:
    """Every checked coordinate and the pass threshold."""

    tolerance: float = DEFAULT_TOLERANCE
    samples: List[GradientSample] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        """Largest relative error, 0 if nothing was checked."""
        return max((s.relative_error for s in self.samples), default=0.0)

    @property
    def passed(self) -> bool:
        """True when every coordinate is within tolerance."""
        return self.max_relative_error < self.tolerance

    def by_group(self) -> Dict[str, float]:
        """Largest relative error per "stage/group"."""
        worst: Dict[str, float] = {}
        for sample in self.samples:
            key = f"stage{sample.stage}/{sample.group}"
            worst[key] = max(worst.get(key, 0.0), sample.relative_error)
        return worst


@dataclass
class GradcheckProblem:
    """A randomised scene and ray batch to differentiate."""

    scene: HybridScene
    light: CombinedLight
    compensator: ScaleCompensator
    batch: RayBatch
    render_config: RenderConfig
    loss_config: LossConfig
    seed: int


def build_problem(seed: int, n_rays: int = 8, samples_per_ray: int = 16) -> GradcheckProblem:
    """Random float64 problem with occlusion masks and a learnable flash scale."""
    dtype = torch.float64
    generator = torch.Generator().manual_seed(seed)

    def noise(*shape: int, scale: float = 1.0) -> Tensor:
        return scale * torch.randn(shape, generator=generator, dtype=dtype)

    eyes = SphereEyeballs((-0.2, 0.1, 0.45), (0.2, 0.1, 0.45), 0.1)
    scene = build_grid_scene(
        GRADCHECK_RESOLUTIONS, eyes, EyePrior(), r0=0.5, beta=0.05, dtype=dtype
    )
    with torch.no_grad():
        for param in scene.parameters():
            param.add_(noise(*param.shape, scale=0.02))
    light = CombinedLight(
        flash_scale=4.0, k00_init=-1.0, view_ids=["0000"], learn_flash_scale=True, dtype=dtype
    )
    with torch.no_grad():
        light.ambient.add_(noise(*light.ambient.shape, scale=0.3))
        if light.occlusion is not None:
            light.occlusion.add_(noise(*light.occlusion.shape, scale=0.3))
    compensator = ScaleCompensator(1.3, dtype=dtype)

    # cameras on a ring looking at jittered points near the head
    angles = torch.rand(n_rays, generator=generator, dtype=dtype) * 2.0 - 1.0
    origins = torch.stack(
        [2.5 * torch.sin(angles), 0.3 * angles, 2.5 * torch.cos(angles)], dim=-1
    )
    targets = noise(n_rays, 3, scale=0.2)
    directions = targets - origins
    directions = directions / directions.norm(dim=-1, keepdim=True)
    batch = RayBatch(
        origins=origins,
        directions=directions,
        rgb=torch.rand((n_rays, 3), generator=generator, dtype=dtype),
        labels=torch.randint(0, len(Label), (n_rays,), generator=generator),
        pseudo_spec=0.5 * torch.rand(n_rays, generator=generator, dtype=dtype),
        view_index=torch.zeros(n_rays, dtype=torch.long),
    )
    render_config = RenderConfig(samples_per_ray=samples_per_ray, near=0.5, far=5.0)
    return GradcheckProblem(scene, light, compensator, batch, render_config, LossConfig(), seed)


def _objective(problem: GradcheckProblem, stage: Stage) -> Tensor:
    generator = torch.Generator().manual_seed(problem.seed)
    inputs: LossInputs
    if stage == Stage.ONE:
        inputs = stage_one_inputs(
            problem.batch,
            problem.scene,
            problem.light,
            problem.compensator,
            problem.render_config,
            smoothness_eps(problem.scene, problem.loss_config),
            generator,
        )
    else:
        inputs = stage_two_inputs(
            problem.batch,
            problem.scene,
            problem.light,
            problem.compensator,
            problem.render_config,
        )
    total, _ = total_loss(inputs, problem.loss_config.weights(stage), stage)
    return total


def central_difference(
    objective: Callable[[], Tensor], param: nn.Parameter, index: int, step: float
) -> float:
    """(f(p + h e_i) - f(p - h e_i)) / 2h, restoring the parameter afterwards."""
    flat = param.data.view(-1)
    original = float(flat[index])
    with torch.no_grad():
        flat[index] = original + step
        plus = float(objective())
        flat[index] = original - step
        minus = float(objective())
        flat[index] = original
    return (plus - minus) / (2.0 * step)


def _pick_coordinates(grad: Tensor, count: int, generator: torch.Generator) -> List[int]:
    flat = grad.reshape(-1)
    candidates = torch.nonzero(flat != 0).reshape(-1)
    if candidates.numel() == 0:
        candidates = torch.arange(flat.numel())
    order = torch.randperm(candidates.numel(), generator=generator)[:count]
    return [int(i) for i in candidates[order]]


def check_stage(
    problem: GradcheckProblem,
    stage: Stage,
    coords_per_group: int = 4,
    step: float = DEFAULT_STEP,
    skip_groups: Sequence[str] = (),
) -> List[GradientSample]:
    """Compare analytic and numeric gradients for every group of ``stage``."""
    groups: List[Tuple[str, List[nn.Parameter]]] = [
        (name, params)
        for name, params in parameter_groups(problem.scene, problem.light, problem.compensator)
        if name not in skip_groups
    ]
    every = [p for _, params in groups for p in params]
    for param in every:
        param.grad = None
    _objective(problem, stage).backward()
    generator = torch.Generator().manual_seed(problem.seed + int(stage))

    samples: List[GradientSample] = []
    for name, params in groups:
        for param in params:
            grad = param.grad if param.grad is not None else torch.zeros_like(param)
            for index in _pick_coordinates(grad, coords_per_group, generator):
                numeric = central_difference(
                    lambda: _objective(problem, stage), param, index, step
                )
                samples.append(
                    GradientSample(int(stage), name, index, float(grad.reshape(-1)[index]), numeric)
                )
    for param in every:
        param.grad = None
    return samples


def run_gradcheck(
    seed: int = 0,
    coords_per_group: int = 4,
    step: float = DEFAULT_STEP,
    tolerance: float = DEFAULT_TOLERANCE,
) -> GradcheckReport:
    """Check both stages of the objective on a random problem seeded with ``seed``.

    The geometry groups are only checked in stage one; they are frozen afterwards.
    """
    problem = build_problem(seed)
    report = GradcheckReport(tolerance=tolerance)
    report.samples.extend(check_stage(problem, Stage.ONE, coords_per_group, step))
    report.samples.extend(
        check_stage(problem, Stage.TWO, coords_per_group, step, skip_groups=("sdf", "beta"))
    )
    logger.info(
        "Gradient check (seed %d): %d coordinates, max relative error %.3e",
        seed,
        len(report.samples),
        report.max_relative_error,
    )
    return report
