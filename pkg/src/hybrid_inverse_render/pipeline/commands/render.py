"""
``render``: render dataset views of a fitted scene.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List

from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.common import frame_index, read_dataset, read_fitted
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.rendering import (
    ImageRender,
    render_image,
    render_surface_image,
    write_png16,
    write_raw,
)

BUFFER_NAMES = ("albedo", "specular", "roughness", "normal", "opacity", "opacity_E", "opacity_S")
GAMMA_BUFFERS = ("rgb", "albedo")


def write_buffer(path: Path, name: str, values: Any, image_format: str) -> Path:
    """Write one render buffer; PNG normals are stored as (n + 1) / 2."""
    if image_format == "raw":
        return write_raw(path.with_suffix(".raw"), values)
    if name == "normal":
        values = 0.5 * (values + 1.0)
    return write_png16(path.with_suffix(".png"), values, gamma_encode=name in GAMMA_BUFFERS)


@register_command("render")
class RenderCommand(CommandBase):
    """Renders one frame (or every frame) of the dataset with the fitted scene.

    Novel views carry no view index, so no occlusion mask is applied.
    """

    help = "Render views of a fitted scene"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--scene", required=True, help="Fit output or scene directory")
        parser.add_argument("--data", required=True, help="Dataset providing the cameras")
        parser.add_argument("--frame", default=None, help="Frame id or index, 'all' for every")
        parser.add_argument("--mode", choices=("volume", "surface"), default="volume")
        parser.add_argument("--format", choices=("png", "raw"), default="png")
        parser.add_argument(
            "--buffers", action="store_true", help="Also write albedo, normal and opacity buffers"
        )

    def execute(self) -> Dict[str, Any]:
        args = self.context.args
        fitted = read_fitted(args.scene, self.config)
        dataset = read_dataset(args.data)
        indices = (
            list(range(len(dataset)))
            if args.frame == "all"
            else [frame_index(dataset, args.frame)]
        )
        written: List[str] = []
        for index in indices:
            frame = dataset.frames[index]
            renderer = render_surface_image if args.mode == "surface" else render_image
            render: ImageRender = renderer(
                frame.camera, fitted.scene, fitted.light, self.config.render
            )
            stem = self.context.out_dir / f"render_{frame.frame_id}"
            written.append(str(write_buffer(stem, "rgb", render.rgb, args.format)))
            if args.buffers:
                for name in BUFFER_NAMES:
                    path = stem.with_name(f"{stem.name}_{name}")
                    write_buffer(path, name, getattr(render, name), args.format)
        self.display.show_text(f"Rendered {len(written)} view(s) into {self.context.out_dir}")
        return {"frames": [dataset.frame_ids[i] for i in indices], "mode": args.mode}
