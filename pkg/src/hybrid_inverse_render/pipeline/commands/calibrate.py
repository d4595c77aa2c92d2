"""
``calibrate``: flashlight colour from a flash-lit white page.
"""

import argparse
from typing import Any, Dict

from hybrid_inverse_render.appearance import CombinedLight, save_light
from hybrid_inverse_render.data import calibrate_flash_color
from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.rendering import read_image
from hybrid_inverse_render.training.trainer import LIGHT_FILENAME


@register_command("calibrate")
class CalibrateCommand(CommandBase):
    """Writes a light state with the calibrated c_L and the configured s_L."""

    help = "Calibrate the flashlight colour from a white-page image"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--image", required=True, help="Linear .raw or sRGB .png image")
        parser.add_argument(
            "--box",
            type=int,
            nargs=4,
            required=True,
            metavar=("ROW0", "COL0", "ROW1", "COL1"),
            help="White patch, end-exclusive",
        )

    def execute(self) -> Dict[str, Any]:
        args = self.context.args
        row0, col0, row1, col1 = args.box
        color = calibrate_flash_color(read_image(args.image), (row0, col0, row1, col1))
        light = CombinedLight(
            flash_scale=self.config.light.flash_scale,
            flash_color=color,
            ambient_enabled=False,
            dtype=self.config.scene.torch_dtype(),
        )
        path = save_light(light, self.context.out_dir / LIGHT_FILENAME)
        self.display.show_text(
            "Flash colour c_L = ({:.4f}, {:.4f}, {:.4f}) written to {}".format(*color, path)
        )
        return {"flash_color": list(color), "flash_scale": self.config.light.flash_scale}
