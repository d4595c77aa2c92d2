"""
Two-stage fitting driver.

Stage one volume renders random ray batches and optimises every parameter
against the full objective. Stage two freezes the SDF grid and beta, shades the
exact surface hit of the fixed geometry and keeps optimising reflectance, the
light and the specular scale compensator.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import torch
from torch import Tensor, nn

from hybrid_inverse_render.appearance import CombinedLight, load_light, save_light
from hybrid_inverse_render.data import CaptureDataset, stack_frames
from hybrid_inverse_render.geometry import SdfGridField
from hybrid_inverse_render.rendering import (
    HybridScene,
    RayRender,
    RenderConfig,
    load_scene,
    render_rays,
    render_surface,
    save_scene,
)
from hybrid_inverse_render.training.config import LossConfig, Stage, TrainConfig
from hybrid_inverse_render.training.losses import (
    TERM_NAMES,
    LossInputs,
    ScaleCompensator,
    normal_smooth_residuals,
    random_unit_vectors,
    total_loss,
)
from hybrid_inverse_render.training.optimizer import adam_step, build_optimizer, current_lr
from hybrid_inverse_render.utils import (
    LOGNAME_TRAINING,
    Diagnostics,
    ErrorSeverity,
    FittingException,
    SystemException,
    ValidationException,
    get_logger,
)

logger = get_logger(LOGNAME_TRAINING)

PathLike = Union[str, Path]
ProgressCallback = Callable[[int, int, Dict[str, float]], None]

LOG_FILENAME = "train_log.csv"
SNAPSHOT_DIRNAME = "snapshots"
LIGHT_FILENAME = "light.json"
FIT_FILENAME = "fit.json"
LOG_COLUMNS = ("step", "stage", *TERM_NAMES, "total", "lr")


@dataclass
class RayBatch:
    """Rays drawn for one step together with their supervision."""

    origins: Tensor
    directions: Tensor
    rgb: Tensor
    labels: Tensor
    pseudo_spec: Tensor
    view_index: Tensor


class RaySampler:
    """Draws rays from the training frames.

    Frames are picked with probability proportional to the area of their
    labelled bounding box, pixels uniformly inside that box.
    """

    def __init__(
        self,
        dataset: CaptureDataset,
        indices: Sequence[int],
        rays_per_batch: int,
        generator: torch.Generator,
        dtype: torch.dtype = torch.float32,
    ) -> None:
        if not indices:
            raise ValidationException(
                message="No training frames left after the hold-out split",
                user_message="The dataset has too few frames for the requested hold-out.",
                severity=ErrorSeverity.ERROR,
            )
        frames = [dataset.frames[i] for i in indices]
        stacked = stack_frames(frames)
        self.indices = torch.tensor(list(indices), dtype=torch.long)
        self.width = dataset.width
        self.rays_per_batch = rays_per_batch
        self.generator = generator
        self.images = stacked["image"].to(dtype).reshape(len(frames), -1, 3)
        self.labels = stacked["labels"].reshape(len(frames), -1)
        self.pseudo_spec = stacked["pseudo_spec"].to(dtype).reshape(len(frames), -1)
        rays = [frame.camera.generate_rays(dtype) for frame in frames]
        self.origins = torch.stack([o for o, _ in rays])
        self.directions = torch.stack([d for _, d in rays])
        boxes = torch.tensor([frame.foreground_box() for frame in frames], dtype=torch.long)
        self.box_origin = boxes[:, :2]
        self.box_size = boxes[:, 2:] - boxes[:, :2]
        self.frame_weights = self.box_size.prod(dim=1).to(torch.float64)

    def sample(self) -> RayBatch:
        """Next batch of rays."""
        n = self.rays_per_batch
        frame = torch.multinomial(
            self.frame_weights, n, replacement=True, generator=self.generator
        )
        offsets = torch.rand((n, 2), generator=self.generator, dtype=torch.float64)
        rows_cols = self.box_origin[frame] + (offsets * self.box_size[frame]).long()
        rows_cols = torch.minimum(rows_cols, self.box_origin[frame] + self.box_size[frame] - 1)
        pixel = rows_cols[:, 0] * self.width + rows_cols[:, 1]
        return RayBatch(
            origins=self.origins[frame, pixel],
            directions=self.directions[frame, pixel],
            rgb=self.images[frame, pixel],
            labels=self.labels[frame, pixel],
            pseudo_spec=self.pseudo_spec[frame, pixel],
            view_index=self.indices[frame],
        )


@dataclass
class FitResult:
    """Fitted state and the training history."""

    scene: HybridScene
    light: CombinedLight
    compensator: ScaleCompensator
    history: List[Dict[str, float]] = field(default_factory=list)
    stage_switch_step: Optional[int] = None
    log_path: Optional[Path] = None

    @property
    def steps(self) -> int:
        """Optimisation steps taken."""
        return len(self.history)


def smoothness_eps(scene: HybridScene, loss_config: LossConfig) -> float:
    """Normal-smoothness radius: the configured value or half the finest voxel."""
    if loss_config.normal_eps is not None:
        return loss_config.normal_eps
    grid = scene.geometry.field
    if isinstance(grid, SdfGridField):
        return 0.5 * grid.finest_voxel_size
    return 1e-2


def parameter_groups(
    scene: HybridScene, light: CombinedLight, compensator: ScaleCompensator
) -> List[Tuple[str, List[nn.Parameter]]]:
    """Named optimizer groups; frozen or absent parameters are left out."""
    groups: List[Tuple[str, List[nn.Parameter]]] = [
        ("sdf", list(scene.geometry.parameters())),
        ("beta", [scene.density.raw_beta]),
        ("reflectance", list(scene.appearance_parameters())),
        ("ambient", [light.ambient]),
        ("k", [compensator.log_k]),
    ]
    if light.occlusion is not None:
        groups.append(("occlusion", [light.occlusion]))
    if light.flash_scale.requires_grad:
        groups.append(("flash_scale", [light.flash_scale]))
    return groups


def freeze_geometry(scene: HybridScene) -> None:
    """Stop gradients to the SDF grid and beta."""
    for param in scene.geometry_parameters():
        param.requires_grad_(False)
        param.grad = None


def _max_weight_points(render: RayRender, n_rays: int) -> Tensor:
    weights = render.weights
    points = render.sample_points
    if weights is None or points is None:
        raise FittingException(
            message="Volume render did not return per-sample weights",
            severity=ErrorSeverity.FATAL,
        )
    best = weights.detach().argmax(dim=1)
    per_ray = points.reshape(n_rays, -1, 3)
    return per_ray[torch.arange(n_rays), best].detach()


def stage_one_inputs(
    batch: RayBatch,
    scene: HybridScene,
    light: CombinedLight,
    compensator: ScaleCompensator,
    render_config: RenderConfig,
    eps: float,
    generator: torch.Generator,
) -> LossInputs:
    view_index = batch.view_index if light.occlusion_enabled else None
    render = render_rays(
        batch.origins, batch.directions, scene, light, render_config, view_index, generator
    )
    n_rays = batch.origins.shape[0]
    points = _max_weight_points(render, n_rays)
    directions = random_unit_vectors(n_rays, scene.dtype, generator)
    residuals = normal_smooth_residuals(points, scene.geometry.normal, eps, directions)
    return LossInputs(
        rendered_rgb=render.rgb,
        target_rgb=batch.rgb,
        labels=batch.labels,
        opacity=render.opacity,
        opacity_E=render.opacity_E,
        opacity_S=render.opacity_S,
        sample_gradients=render.sample_gradients,
        smooth_residuals=residuals,
        rendered_spec=render.specular,
        pseudo_spec=batch.pseudo_spec,
        k=compensator(),
    )


def stage_two_inputs(
    batch: RayBatch,
    scene: HybridScene,
    light: CombinedLight,
    compensator: ScaleCompensator,
    render_config: RenderConfig,
) -> LossInputs:
    view_index = batch.view_index if light.occlusion_enabled else None
    render = render_surface(
        batch.origins, batch.directions, scene, light, render_config, view_index
    )
    return LossInputs(
        rendered_rgb=render.rgb,
        target_rgb=batch.rgb,
        labels=batch.labels,
        rendered_spec=render.specular,
        pseudo_spec=batch.pseudo_spec,
        k=compensator(),
    )


class TrainingLog:
    """CSV writer for the per-step loss breakdown."""

    def __init__(self, path: Optional[Path]) -> None:
        self.path = path
        self._handle: Optional[TextIO] = None
        self._writer: Optional["csv.DictWriter[str]"] = None
        if path is None:
            return
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = path.open("w", newline="", encoding="utf-8")
        except OSError as e:
            raise SystemException(
                message=f"Failed to open training log {path}: {e}",
                user_message=f"Unable to write {path}. Please check the output directory.",
                severity=ErrorSeverity.ERROR,
                original_error=e,
            ) from e
        self._writer = csv.DictWriter(self._handle, fieldnames=list(LOG_COLUMNS))
        self._writer.writeheader()

    def append(self, row: Dict[str, float]) -> None:
        """Write one row; inactive terms stay empty."""
        if self._writer is None or self._handle is None:
            return
        self._writer.writerow({key: row.get(key, "") for key in LOG_COLUMNS})
        self._handle.flush()

    def close(self) -> None:
        """Close the underlying file."""
        if self._handle is not None:
            self._handle.close()
            self._handle = None
            self._writer = None


def save_fit_state(
    scene: HybridScene,
    light: CombinedLight,
    compensator: ScaleCompensator,
    directory: PathLike,
    step: Optional[int] = None,
) -> Path:
    """Write scene snapshots, the light state and k into ``directory``."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        save_scene(scene, directory)
        save_light(light, directory / LIGHT_FILENAME)
        (directory / FIT_FILENAME).write_text(
            json.dumps({"k": compensator.k, "step": step}, indent=2), encoding="utf-8"
        )
    except OSError as e:
        raise SystemException(
            message=f"Failed to write fit state into {directory}: {e}",
            user_message=f"Unable to write the fitted state into {directory}.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    return directory


def load_fit_state(directory: PathLike, dtype: torch.dtype = torch.float32) -> FitResult:
    """Read a state written by :func:`save_fit_state`; a missing ``fit.json`` means k = 1."""
    directory = Path(directory)
    scene = load_scene(directory, dtype=dtype)
    light = load_light(directory / LIGHT_FILENAME, dtype=dtype)
    k = 1.0
    fit_file = directory / FIT_FILENAME
    if fit_file.exists():
        try:
            k = float(json.loads(fit_file.read_text(encoding="utf-8"))["k"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise SystemException(
                message=f"Failed to read {fit_file}: {e}",
                user_message=f"The fit description in {directory} is corrupted.",
                severity=ErrorSeverity.ERROR,
                original_error=e,
            ) from e
    return FitResult(scene, light, ScaleCompensator(k, dtype=dtype))


class DivergenceGuard:
    """Aborts when the loss stays above factor x its first value for too long."""

    def __init__(self, factor: float, patience: int) -> None:
        self.factor = factor
        self.patience = patience
        self.initial: Optional[float] = None
        self.strikes = 0

    def update(self, step: int, loss: float) -> None:
        """Record the loss of ``step``; raises FittingException on divergence."""
        if self.initial is None:
            self.initial = loss
            return
        if not np.isfinite(loss) or loss > self.factor * self.initial:
            self.strikes += 1
        else:
            self.strikes = 0
        if self.strikes >= self.patience:
            raise FittingException(
                message=(
                    f"Loss diverged at step {step}: {loss:.6g} stayed above "
                    f"{self.factor:g} x {self.initial:.6g} for {self.strikes} steps"
                ),
                user_message="Fitting diverged. Try a lower learning rate.",
                severity=ErrorSeverity.FATAL,
            )


def fit(
    dataset: CaptureDataset,
    scene: HybridScene,
    light: CombinedLight,
    compensator: ScaleCompensator,
    train_config: TrainConfig,
    loss_config: LossConfig,
    render_config: RenderConfig,
    train_indices: Optional[Sequence[int]] = None,
    out_dir: Optional[PathLike] = None,
    progress: Optional[ProgressCallback] = None,
) -> FitResult:
    """Run the two-stage schedule in place on ``scene``, ``light`` and ``compensator``.

    Args:
        dataset: Validated capture dataset; frame order gives the occlusion view index.
        scene: Scene to fit.
        light: Light to fit; ``view_ids`` must follow the dataset frame order.
        compensator: Specular scale compensator k.
        train_config: Schedule.
        loss_config: Loss weights of both stages.
        render_config: Renderer settings.
        train_indices: Frames to sample rays from, all frames if None.
        out_dir: Receives ``train_log.csv`` and snapshots; nothing is written if None.
        progress: Called after every step with (step, total steps, breakdown with "total").

    Returns:
        FitResult: The fitted objects and the per-step history.
    """
    if light.occlusion_enabled and light.view_ids != dataset.frame_ids:
        raise ValidationException(
            message="Occlusion masks must be declared for every dataset frame, in order",
            severity=ErrorSeverity.ERROR,
        )
    indices = list(range(len(dataset))) if train_indices is None else list(train_indices)
    generator = torch.Generator().manual_seed(train_config.seed)
    sampler = RaySampler(dataset, indices, train_config.rays_per_batch, generator, scene.dtype)
    eps = smoothness_eps(scene, loss_config)
    optimizer, scheduler = build_optimizer(
        parameter_groups(scene, light, compensator), train_config
    )
    out_path = Path(out_dir) if out_dir is not None else None
    log = TrainingLog(out_path / LOG_FILENAME if out_path is not None else None)
    guard = DivergenceGuard(train_config.divergence_factor, train_config.divergence_patience)
    result = FitResult(scene, light, compensator, log_path=log.path)

    logger.info(
        "Fitting %d iterations (%d volume) on %d frames, %d rays per batch",
        train_config.total_iters,
        train_config.stage1_iters,
        len(indices),
        train_config.rays_per_batch,
    )
    try:
        for step in range(train_config.total_iters):
            stage = Stage.ONE if step < train_config.stage1_iters else Stage.TWO
            if stage == Stage.TWO and result.stage_switch_step is None:
                result.stage_switch_step = step
                freeze_geometry(scene)
                logger.info("Switching to surface rendering at step %d", step)

            batch = sampler.sample()
            if stage == Stage.ONE:
                inputs = stage_one_inputs(
                    batch, scene, light, compensator, render_config, eps, generator
                )
            else:
                inputs = stage_two_inputs(batch, scene, light, compensator, render_config)
            total, breakdown = total_loss(inputs, loss_config.weights(stage), stage)

            optimizer.zero_grad(set_to_none=True)
            if total.requires_grad:
                total.backward()
            lr = current_lr(optimizer)
            adam_step(optimizer)
            scheduler.step()

            loss_value = float(total.detach())
            row: Dict[str, float] = {
                "step": float(step),
                "stage": float(int(stage)),
                **breakdown,
                "total": loss_value,
                "lr": lr,
            }
            result.history.append(row)
            log.append(row)
            logger.debug("step %d stage %d %s", step, int(stage), breakdown)
            if (step + 1) % train_config.log_every == 0:
                logger.info(
                    "step %d/%d loss %.6g lr %.3g",
                    step + 1,
                    train_config.total_iters,
                    loss_value,
                    lr,
                )
            if (
                out_path is not None
                and train_config.snapshot_every > 0
                and (step + 1) % train_config.snapshot_every == 0
            ):
                snapshot = out_path / SNAPSHOT_DIRNAME / f"step_{step + 1:06d}"
                save_fit_state(scene, light, compensator, snapshot, step + 1)
                logger.info("Wrote snapshot %s", snapshot)
            guard.update(step, loss_value)
            if progress is not None:
                progress(step + 1, train_config.total_iters, {**breakdown, "total": loss_value})
    finally:
        log.close()

    counters = Diagnostics.snapshot()
    if counters:
        logger.info("Diagnostics after fitting: %s", counters)
    return result
