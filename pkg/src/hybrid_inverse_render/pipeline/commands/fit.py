"""
``fit``: two-stage reconstruction of a capture dataset.

Writes ``scene/`` (grid snapshots, light.json, fit.json), ``train_log.csv``,
optional ``snapshots/`` and ``metrics.json`` with held-out evaluations before
and after fitting.
"""

import argparse
from dataclasses import asdict
from typing import Any, Dict, List, Mapping

from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.common import build_light, read_dataset, write_json
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.rendering import build_grid_scene
from hybrid_inverse_render.training import (
    EvaluationReport,
    ScaleCompensator,
    TrainConfig,
    evaluate_views,
    fit,
    save_fit_state,
)
from hybrid_inverse_render.utils import LOGNAME_PIPELINE, get_logger

METRICS_FILENAME = "metrics.json"
SCENE_DIRNAME = "scene"

logger = get_logger(LOGNAME_PIPELINE)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


@register_command("fit")
class FitCommand(CommandBase):
    """Fits geometry, reflectance, light and k to a dataset."""

    help = "Fit the hybrid scene to a capture dataset"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", required=True, help="Dataset directory")
        group = parser.add_argument_group("schedule", "Override any train.* setting")
        for name, info in TrainConfig.model_fields.items():
            group.add_argument(
                _flag(name),
                dest=f"train_{name}",
                type=info.annotation,
                default=None,
                help=f"train.{name} (config default {info.default})",
            )

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Mapping[str, Any]:
        return {
            f"train.{name}": getattr(args, f"train_{name}") for name in TrainConfig.model_fields
        }

    def execute(self) -> Dict[str, Any]:
        config = self.config
        dataset = read_dataset(self.context.args.data)
        dtype = config.scene.torch_dtype()
        scene = build_grid_scene(
            config.scene.resolutions,
            config.scene.fitted_eyes(),
            config.scene.eye_prior(),
            r0=config.scene.r0,
            beta=config.render.density_beta,
            alpha=config.render.density_alpha,
            level_weights=config.scene.level_weights,
            dtype=dtype,
        )
        light = build_light(config, dataset.frame_ids)
        compensator = ScaleCompensator(1.0, dtype=dtype)

        train_indices, held_out = dataset.split(config.train.holdout_every)
        eval_indices: List[int] = held_out or train_indices
        before = evaluate_views(dataset, eval_indices, scene, light, config.render)

        with self.display.progress("Fitting", config.train.total_iters) as update:
            result = fit(
                dataset,
                scene,
                light,
                compensator,
                config.train,
                config.loss,
                config.render,
                train_indices=train_indices,
                out_dir=self.context.out_dir,
                progress=update,
            )
        scene_dir = self.context.out_dir / SCENE_DIRNAME
        save_fit_state(scene, light, compensator, scene_dir, result.steps)

        after = evaluate_views(
            dataset, eval_indices, scene, light, config.render, k=compensator.k
        )
        metrics = {
            "evaluated_frames": [dataset.frame_ids[i] for i in eval_indices],
            "held_out": bool(held_out),
            "k": compensator.k,
            "stage_switch_step": result.stage_switch_step,
            "before": before.summary(),
            "after": after.summary(),
            "views": [asdict(view) for view in after.views],
        }
        write_json(self.context.out_dir / METRICS_FILENAME, metrics)
        self._show_report(before, after)
        final_loss = result.history[-1]["total"] if result.history else None
        logger.info("Fit finished after %d steps, final loss %s", result.steps, final_loss)
        return {
            "steps": result.steps,
            "final_loss": final_loss,
            "k": compensator.k,
            "metrics": metrics["after"],
        }

    def _show_report(self, before: EvaluationReport, after: EvaluationReport) -> None:
        start, end = before.summary(), after.summary()
        rows = [
            [name, f"{start.get(name, float('nan')):.4f}", f"{value:.4f}"]
            for name, value in end.items()
        ]
        self.display.show_table("Evaluation", ["metric", "before", "after"], rows)
