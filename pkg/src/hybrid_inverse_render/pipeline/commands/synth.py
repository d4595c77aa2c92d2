"""
``synth``: render a synthetic capture of a known head with eyeballs.
"""

import argparse
from typing import Any, Dict, Mapping

from hybrid_inverse_render.appearance import save_light
from hybrid_inverse_render.data import build_synthetic_scene, generate_synthetic, save_dataset
from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.registry import register_command

GT_LIGHT_FILENAME = "gt_light.json"


@register_command("synth")
class SynthCommand(CommandBase):
    """Writes a loadable dataset into the output directory plus the ground-truth light."""

    help = "Generate a synthetic capture dataset"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--views", type=int, default=None, help="synthetic.n_views")
        parser.add_argument("--width", type=int, default=None, help="synthetic.width")
        parser.add_argument("--height", type=int, default=None, help="synthetic.height")
        parser.add_argument(
            "--format",
            choices=("raw", "png"),
            default=None,
            help="synthetic.image_format",
        )

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Mapping[str, Any]:
        return {
            "synthetic.n_views": args.views,
            "synthetic.width": args.width,
            "synthetic.height": args.height,
            "synthetic.image_format": args.format,
        }

    def execute(self) -> Dict[str, Any]:
        synthetic = self.config.synthetic
        scene = build_synthetic_scene(
            synthetic, self.config.scene.eyes(), self.config.scene.eye_prior()
        )
        dataset = generate_synthetic(
            scene,
            synthetic.n_views,
            (synthetic.width, synthetic.height),
            synthetic.seed,
            synthetic,
        )
        out_dir = self.context.out_dir
        save_dataset(dataset, out_dir, synthetic.image_format)
        save_light(scene.light, out_dir / GT_LIGHT_FILENAME)
        self.display.show_text(
            f"Wrote {len(dataset)} frames ({synthetic.width}x{synthetic.height}) to {out_dir}"
        )
        return {"frames": len(dataset), "width": synthetic.width, "height": synthetic.height}
