"""
``relight``: move aligned performance frames to a new SH environment.

The lighting of the first frame is estimated from SH basis renders of the
fitted scan; every frame is then scaled by the ratio of the scan rendered
under the target and under the estimated environment. Dataset frames are
flash-lit, so their flash render is removed before the estimate.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.common import (
    frame_index,
    read_camera_file,
    read_dataset,
    read_fitted,
)
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.relight import (
    load_sh_weights,
    relight_sequence,
    render_sh_basis,
    save_sh_weights,
)
from hybrid_inverse_render.rendering import Camera, read_image, write_image
from hybrid_inverse_render.utils import ConfigurationException, DatasetException, ErrorSeverity

IMAGE_SUFFIXES = (".png", ".raw")
SH_WEIGHTS_FILENAME = "sh_weights.json"
RELIT_DIRNAME = "relit"


def read_performance(path: Path) -> List[np.ndarray]:
    """Linear RGB frames from an image file or a directory of images (sorted by name)."""
    files = (
        sorted(p for p in path.iterdir() if p.suffix in IMAGE_SUFFIXES)
        if path.is_dir()
        else [path]
    )
    if not files:
        raise DatasetException(
            message=f"No .png or .raw frames in {path}",
            user_message=f"{path} holds no performance frames.",
            severity=ErrorSeverity.ERROR,
        )
    return [read_image(f)[:, :, :3] for f in files]


@register_command("relight")
class RelightCommand(CommandBase):
    """Ratio-image relighting of a performance with the fitted scan as proxy."""

    help = "Relight aligned performance frames under a target SH environment"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--scene", required=True, help="Fit output or scene directory")
        parser.add_argument("--target-env", required=True, help="JSON with 9 SH coefficients")
        parser.add_argument("--camera", default=None, help="Camera JSON aligned with the frames")
        parser.add_argument("--data", default=None, help="Dataset providing the camera")
        parser.add_argument("--frame", default=None, help="Frame id or index in --data")
        parser.add_argument(
            "--performance",
            default=None,
            help="Image or directory of aligned frames, the dataset frame if omitted",
        )
        parser.add_argument(
            "--flash-lit",
            action="store_true",
            help="The performance frames were captured with the flash on",
        )
        parser.add_argument("--format", choices=("png", "raw"), default="png")

    def _camera_and_frames(self) -> Tuple[Camera, List[np.ndarray], bool]:
        """Viewpoint, frames and whether the frames include the flash."""
        args = self.context.args
        if args.camera is None and args.data is None:
            raise ConfigurationException(
                message="relight needs --camera or --data",
                user_message="Give the viewpoint with --camera or with --data and --frame.",
                severity=ErrorSeverity.ERROR,
            )
        frames: Optional[List[np.ndarray]] = None
        flash_lit = bool(args.flash_lit)
        if args.camera is not None:
            camera = read_camera_file(args.camera)
        else:
            dataset = read_dataset(args.data)
            frame = dataset.frames[frame_index(dataset, args.frame)]
            camera, frames = frame.camera, [frame.image]
            flash_lit = True
        if args.performance is not None:
            frames = read_performance(Path(args.performance))
            flash_lit = bool(args.flash_lit)
        if frames is None:
            raise ConfigurationException(
                message="relight with --camera needs --performance",
                user_message="Give the frames to relight with --performance.",
                severity=ErrorSeverity.ERROR,
            )
        return camera, frames, flash_lit

    def execute(self) -> Dict[str, Any]:
        args = self.context.args
        fitted = read_fitted(args.scene, self.config)
        target = load_sh_weights(args.target_env)
        camera, frames, flash_lit = self._camera_and_frames()
        for frame in frames:
            if frame.shape[:2] != (camera.height, camera.width):
                raise DatasetException(
                    message=(
                        f"performance frame of size {frame.shape[:2]} is not aligned with the "
                        f"{camera.height}x{camera.width} camera"
                    ),
                    severity=ErrorSeverity.ERROR,
                )

        basis = render_sh_basis(fitted.scene, camera, fitted.light, self.config.render)
        relit = relight_sequence(
            basis,
            frames,
            target,
            self.config.relight.mask_threshold,
            self.config.relight.ratio_floor,
            flash_lit,
        )
        out_dir = self.context.out_dir
        suffix = f".{args.format}"
        for index, image in enumerate(relit.frames):
            write_image(out_dir / RELIT_DIRNAME / f"{index:04d}{suffix}", image)
        write_image(out_dir / f"source_render{suffix}", relit.source_render)
        write_image(out_dir / f"target_render{suffix}", relit.target_render)
        save_sh_weights(
            out_dir / SH_WEIGHTS_FILENAME,
            relit.source_lighting.weights,
            relit.source_lighting.residual,
        )
        self.display.show_text(
            f"Relit {len(relit.frames)} frame(s); SH fit rank {relit.source_lighting.rank}, "
            f"residual {relit.source_lighting.residual:.4g}"
        )
        return {
            "frames": len(relit.frames),
            "sh_rank": relit.source_lighting.rank,
            "sh_residual": relit.source_lighting.residual,
            "flash_lit": flash_lit,
        }
