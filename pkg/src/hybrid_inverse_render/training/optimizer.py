"""
Adam with per-group non-finite gradient guards and the step learning-rate decay.
"""

from typing import Dict, Iterable, List, Sequence, Tuple

import torch
from torch import nn
from torch.optim import Adam
from torch.optim.lr_scheduler import StepLR

from hybrid_inverse_render.training.config import TrainConfig
from hybrid_inverse_render.utils import (
    LOGNAME_TRAINING,
    SKIPPED_OPTIMIZER_GROUPS,
    Diagnostics,
    get_logger,
)

logger = get_logger(LOGNAME_TRAINING)

ParameterGroups = Sequence[Tuple[str, Iterable[nn.Parameter]]]


def lr_at(iteration: int, config: TrainConfig) -> float:
    """lr0 * factor^floor(iteration / every)."""
    return config.lr0 * config.lr_decay_factor ** (iteration // config.lr_decay_every)


def build_optimizer(groups: ParameterGroups, config: TrainConfig) -> Tuple[Adam, StepLR]:
    """One Adam over the named parameter groups plus its step decay schedule.

    Empty groups are dropped; every group keeps its name for diagnostics.
    """
    param_groups: List[Dict[str, object]] = []
    for name, params in groups:
        materialised = list(params)
        if materialised:
            param_groups.append({"params": materialised, "name": name})
    optimizer = Adam(
        param_groups,
        lr=config.lr0,
        betas=(config.adam_beta1, config.adam_beta2),
        eps=config.adam_eps,
    )
    scheduler = StepLR(optimizer, step_size=config.lr_decay_every, gamma=config.lr_decay_factor)
    return optimizer, scheduler


def adam_step(optimizer: Adam) -> List[str]:
    """Take one Adam step, skipping every group holding a non-finite gradient.

    Skipped groups have their gradients dropped so Adam leaves them (and their
    moments) untouched this step.

    Returns:
        List[str]: Names of the skipped groups.
    """
    skipped: List[str] = []
    for group in optimizer.param_groups:
        grads = [p.grad for p in group["params"] if p.grad is not None]
        if all(bool(torch.isfinite(g).all()) for g in grads):
            continue
        for param in group["params"]:
            param.grad = None
        name = str(group.get("name", "?"))
        skipped.append(name)
        logger.warning("Skipping optimizer group %s: non-finite gradient", name)
    Diagnostics.increment(SKIPPED_OPTIMIZER_GROUPS, len(skipped))
    optimizer.step()
    return skipped


def current_lr(optimizer: Adam) -> float:
    """Learning rate of the first group."""
    return float(optimizer.param_groups[0]["lr"])
