"""
``export``: textured mesh of a fitted scene.
"""

import argparse
from typing import Any, Dict, Mapping

from hybrid_inverse_render.export import export_scene, read_obj, write_assets
from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.common import (
    read_dataset,
    read_fitted,
    training_cameras,
)
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.utils import ErrorSeverity, ExportException


@register_command("export")
class ExportCommand(CommandBase):
    """Runs the export chain on the training cameras and re-reads the written OBJ."""

    help = "Export a fitted scene as OBJ/MTL with PNG texture maps"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--scene", required=True, help="Fit output or scene directory")
        parser.add_argument("--data", required=True, help="Dataset whose cameras cull the mesh")
        parser.add_argument("--resolution", type=int, default=None, help="export.resolution")
        parser.add_argument("--iso", type=float, default=None, help="export.iso")
        parser.add_argument("--texture-size", type=int, default=None, help="export.texture_size")
        parser.add_argument("--stem", default="head", help="Base name of the OBJ and MTL files")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> Mapping[str, Any]:
        return {
            "export.resolution": args.resolution,
            "export.iso": args.iso,
            "export.texture_size": args.texture_size,
        }

    def execute(self) -> Dict[str, Any]:
        args = self.context.args
        fitted = read_fitted(args.scene, self.config)
        dataset = read_dataset(args.data)
        cameras = training_cameras(dataset, self.config.train.holdout_every)
        assets = export_scene(fitted.scene, cameras, self.config.export)
        obj_path = write_assets(assets, self.context.out_dir, args.stem)

        parsed = read_obj(obj_path)
        if parsed.triangles.shape[0] != assets.mesh.triangle_count:
            raise ExportException(
                message=(
                    f"{obj_path} holds {parsed.triangles.shape[0]} faces, "
                    f"{assets.mesh.triangle_count} were written"
                ),
                severity=ErrorSeverity.ERROR,
            )
        summary = {
            "obj": obj_path.name,
            "vertices": assets.mesh.vertex_count,
            "triangles": assets.mesh.triangle_count,
            "texture_size": assets.layout.texture_size,
        }
        self.display.show_mapping("Exported mesh", summary)
        return summary
