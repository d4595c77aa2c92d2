"""Tests for subcommand registration, creation and the shared command helpers."""

import argparse
import json
from pathlib import Path

import pytest
import torch

from hybrid_inverse_render.appearance import CombinedLight
from hybrid_inverse_render.data import CaptureDataset, build_synthetic_scene, generate_synthetic
from hybrid_inverse_render.pipeline import (
    CommandContext,
    CommandFactory,
    CommandRegistry,
    RichDisplay,
    RunConfig,
    load_run_config,
)
from hybrid_inverse_render.pipeline.commands.common import (
    build_light,
    frame_index,
    read_camera_file,
    read_fitted,
    training_cameras,
)
from hybrid_inverse_render.rendering import build_grid_scene
from hybrid_inverse_render.training import ScaleCompensator, save_fit_state
from hybrid_inverse_render.utils import ConfigurationException, DatasetException

COMMANDS = ["calibrate", "export", "fit", "gradcheck", "relight", "render", "synth"]


@pytest.fixture
def tiny_config(test_config_path: Path) -> RunConfig:
    """The test configuration."""
    return load_run_config(test_config_path)


@pytest.fixture
def tiny_dataset(tiny_config: RunConfig) -> CaptureDataset:
    """Four 8x8 synthetic frames."""
    synthetic = tiny_config.synthetic
    scene = build_synthetic_scene(
        synthetic, tiny_config.scene.eyes(), tiny_config.scene.eye_prior()
    )
    return generate_synthetic(scene, 4, (8, 8), 0, synthetic)


def test_registry_lists_every_command() -> None:
    """Every command module registers itself."""
    assert CommandRegistry().list_registered_commands() == COMMANDS
    assert CommandRegistry() is CommandRegistry()


def test_unknown_command() -> None:
    """Unknown names are configuration errors."""
    with pytest.raises(ConfigurationException, match="Unknown subcommand"):
        CommandRegistry().get_command_class("train")


def test_factory_creates_bound_command(
    tiny_config: RunConfig, display: RichDisplay, tmp_path: Path
) -> None:
    """Commands receive their context."""
    factory = CommandFactory(CommandRegistry())
    context = CommandContext(argparse.Namespace(), tiny_config, tmp_path, display, 0, 1)

    command = factory.create_command("SYNTH", context)

    assert command.config is tiny_config
    assert command.display is display
    assert factory.list_available_commands() == COMMANDS


def test_fit_flags_cover_the_schedule() -> None:
    """Every train.* field has a fit flag mapped onto its dotted key."""
    fit_class = CommandRegistry().get_command_class("fit")
    parser = argparse.ArgumentParser()
    fit_class.add_arguments(parser)

    args = parser.parse_args(["--data", "d", "--total-iters", "12", "--lr0", "0.01"])
    overrides = fit_class.config_overrides(args)

    assert overrides["train.total_iters"] == 12
    assert overrides["train.lr0"] == 0.01
    assert overrides["train.seed"] is None


def test_build_light(tiny_config: RunConfig) -> None:
    """Occlusion rows exist only when enabled in the light section."""
    plain = build_light(tiny_config, ["0000", "0001"])
    masked = build_light(
        tiny_config.model_copy(
            update={"light": tiny_config.light.model_copy(update={"occlusion_masks": True})}
        ),
        ["0000", "0001"],
    )

    assert not plain.occlusion_enabled
    assert masked.view_ids == ["0000", "0001"]
    assert plain.ambient.dtype == torch.float64


def test_frame_index(tiny_dataset: CaptureDataset) -> None:
    """Frames are found by id or position; the first frame by default."""
    assert frame_index(tiny_dataset, None) == 0
    assert frame_index(tiny_dataset, "0002") == 2
    assert frame_index(tiny_dataset, "3") == 3
    with pytest.raises(DatasetException):
        frame_index(tiny_dataset, "0009")


def test_training_cameras(tiny_dataset: CaptureDataset) -> None:
    """Held-out frames do not cull the export."""
    assert len(training_cameras(tiny_dataset, 2)) == 2
    assert len(training_cameras(tiny_dataset, 0)) == 4


def test_read_camera_file(tiny_dataset: CaptureDataset, tmp_path: Path) -> None:
    """Standalone camera files carry intrinsics, size and pose."""
    camera = tiny_dataset.frames[1].camera
    path = tmp_path / "view.json"
    path.write_text(
        json.dumps(
            {
                "intrinsics": camera.intrinsics.tolist(),
                "width": camera.width,
                "height": camera.height,
                "pose": camera.pose.tolist(),
            }
        ),
        encoding="utf-8",
    )

    loaded = read_camera_file(str(path))

    assert (loaded.width, loaded.height) == (8, 8)
    assert torch.allclose(loaded.pose, camera.pose)


@pytest.mark.parametrize("content,match", [(None, "not found"), ('{"width": 4}', "Malformed")])
def test_read_camera_file_errors(tmp_path: Path, content: object, match: str) -> None:
    """Missing and incomplete camera files are dataset errors."""
    path = tmp_path / "view.json"
    if isinstance(content, str):
        path.write_text(content, encoding="utf-8")

    with pytest.raises(DatasetException, match=match):
        read_camera_file(str(path))


def test_read_fitted(tiny_config: RunConfig, tmp_path: Path) -> None:
    """Both the fit output root and its scene folder are accepted."""
    scene = build_grid_scene(
        tiny_config.scene.resolutions,
        tiny_config.scene.eyes(),
        tiny_config.scene.eye_prior(),
        dtype=torch.float64,
    )
    save_fit_state(
        scene, CombinedLight(dtype=torch.float64), ScaleCompensator(0.5), tmp_path / "scene"
    )

    assert read_fitted(str(tmp_path), tiny_config).compensator.k == pytest.approx(0.5)
    assert read_fitted(str(tmp_path / "scene"), tiny_config).scene.dtype == torch.float64
    with pytest.raises(DatasetException, match="not found"):
        read_fitted(str(tmp_path / "absent"), tiny_config)
