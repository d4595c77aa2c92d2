"""
Subpackage for fitting: loss terms, the optimizer and its schedule, the
two-stage trainer, evaluation metrics and the gradient checker.
"""

from hybrid_inverse_render.training.config import LossConfig, LossWeights, Stage, TrainConfig
from hybrid_inverse_render.training.gradcheck import (
    GradcheckReport,
    GradientSample,
    build_problem,
    central_difference,
    check_stage,
    run_gradcheck,
)
from hybrid_inverse_render.training.losses import (
    TERM_NAMES,
    LossInputs,
    ScaleCompensator,
    composition_loss,
    eikonal_loss,
    loss_terms,
    mask_loss,
    normal_smooth_loss,
    normal_smooth_residuals,
    photometric_l1,
    random_unit_vectors,
    reflectance_reg,
    total_loss,
)
from hybrid_inverse_render.training.metrics import (
    EvaluationReport,
    ViewMetrics,
    evaluate_views,
    masked_mae,
    psnr,
    region_separation,
)
from hybrid_inverse_render.training.optimizer import (
    adam_step,
    build_optimizer,
    current_lr,
    lr_at,
)
from hybrid_inverse_render.training.trainer import (
    DivergenceGuard,
    FitResult,
    RayBatch,
    RaySampler,
    TrainingLog,
    fit,
    freeze_geometry,
    load_fit_state,
    parameter_groups,
    save_fit_state,
    smoothness_eps,
)

__all__ = [
    "LossConfig",
    "LossWeights",
    "Stage",
    "TrainConfig",
    "GradcheckReport",
    "GradientSample",
    "build_problem",
    "central_difference",
    "check_stage",
    "run_gradcheck",
    "TERM_NAMES",
    "LossInputs",
    "ScaleCompensator",
    "composition_loss",
    "eikonal_loss",
    "loss_terms",
    "mask_loss",
    "normal_smooth_loss",
    "normal_smooth_residuals",
    "photometric_l1",
    "random_unit_vectors",
    "reflectance_reg",
    "total_loss",
    "EvaluationReport",
    "ViewMetrics",
    "evaluate_views",
    "masked_mae",
    "psnr",
    "region_separation",
    "adam_step",
    "build_optimizer",
    "current_lr",
    "lr_at",
    "DivergenceGuard",
    "FitResult",
    "RayBatch",
    "RaySampler",
    "TrainingLog",
    "fit",
    "freeze_geometry",
    "load_fit_state",
    "parameter_groups",
    "save_fit_state",
    "smoothness_eps",
]
