"""Tests for the command line entry point.

Subcommands run end to end on tiny inputs; expensive collaborators are patched
where only the exit status matters.
"""

import json
import sys
from pathlib import Path
from typing import List

import numpy as np
import pytest
from pytest import MonkeyPatch

from hybrid_inverse_render.main import main, run
from hybrid_inverse_render.rendering import write_raw
from hybrid_inverse_render.training import GradcheckReport, GradientSample
from hybrid_inverse_render.utils import EXIT_INTERNAL_ERROR, EXIT_USER_ERROR


def _read_run_record(out_dir: Path) -> dict:
    return json.loads((out_dir / "run.json").read_text(encoding="utf-8"))


def test_version() -> None:
    """--version exits cleanly."""
    assert run(["--version"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["train"],
        ["fit"],
        ["synth", "--bogus"],
        ["synth", "--config", "a.json", "--preset", "b"],
    ],
)
def test_bad_arguments(argv: List[str]) -> None:
    """Missing subcommands, unknown flags and conflicting sources are user errors."""
    assert run(argv) == EXIT_USER_ERROR


def test_missing_config_file(tmp_path: Path) -> None:
    """A config path that does not exist is a user error."""
    assert run(["synth", "--config", str(tmp_path / "absent.json")]) == EXIT_USER_ERROR


def test_invalid_config_file(config_dir: Path, tmp_path: Path) -> None:
    """A config failing validation is a user error and nothing is written."""
    argv = ["synth", "--config", str(config_dir / "test_config_invalid.json")]

    assert run(argv + ["--out", str(tmp_path)]) == EXIT_USER_ERROR
    assert not (tmp_path / "run.json").exists()


def test_workers_must_be_positive(config_dir: Path, tmp_path: Path) -> None:
    """--workers 0 is rejected."""
    argv = ["synth", "--config", str(config_dir / "test_config.json"), "--workers", "0"]

    assert run(argv + ["--out", str(tmp_path)]) == EXIT_USER_ERROR


def test_synth(config_dir: Path, tmp_path: Path) -> None:
    """synth writes a dataset, the ground-truth light and a run record."""
    out_dir = tmp_path / "capture"
    argv = ["synth", "--config", str(config_dir / "test_config.json"), "--seed", "5"]

    assert run(argv + ["--views", "5", "--out", str(out_dir)]) == 0

    cameras = json.loads((out_dir / "cameras.json").read_text(encoding="utf-8"))
    assert len(cameras["frames"]) == 5
    assert (out_dir / "gt_light.json").is_file()
    record = _read_run_record(out_dir)
    assert record["command"] == "synth"
    assert record["seed"] == 5
    assert record["config"]["synthetic"]["seed"] == 5
    assert record["results"]["frames"] == 5


def test_calibrate(tmp_path: Path) -> None:
    """calibrate writes a light whose colour has a unit maximum channel."""
    image = np.zeros((6, 6, 3), dtype=np.float32)
    image[1:5, 1:5] = (0.8, 0.6, 0.4)
    write_raw(tmp_path / "page.raw", image)
    out_dir = tmp_path / "calib"

    code = run(
        ["calibrate", "--image", str(tmp_path / "page.raw"), "--box", "1", "1", "5", "5"]
        + ["--out", str(out_dir)]
    )

    assert code == 0
    assert (out_dir / "light.json").is_file()
    color = _read_run_record(out_dir)["results"]["flash_color"]
    assert color == pytest.approx([1.0, 0.75, 0.5])


def test_calibrate_box_outside_image(tmp_path: Path) -> None:
    """A patch outside the image is a user error."""
    write_raw(tmp_path / "page.raw", np.ones((4, 4, 3), dtype=np.float32))

    code = run(
        ["calibrate", "--image", str(tmp_path / "page.raw"), "--box", "0", "0", "9", "9"]
        + ["--out", str(tmp_path / "calib")]
    )

    assert code == EXIT_USER_ERROR


def test_gradcheck_failure_is_internal(monkeypatch: MonkeyPatch, tmp_path: Path) -> None:
    """Disagreeing gradients exit with the internal error status."""
    report = GradcheckReport(tolerance=1e-3, samples=[GradientSample(1, "sdf", 0, 1.0, 2.0)])
    monkeypatch.setattr(
        "hybrid_inverse_render.pipeline.commands.gradcheck.run_gradcheck",
        lambda **_: report,
    )

    assert run(["gradcheck", "--out", str(tmp_path)]) == EXIT_INTERNAL_ERROR


def test_gradcheck_success(monkeypatch: MonkeyPatch, tmp_path: Path) -> None:
    """Agreeing gradients exit 0 and are recorded."""
    report = GradcheckReport(samples=[GradientSample(2, "k", 0, 1.0, 1.0)])
    monkeypatch.setattr(
        "hybrid_inverse_render.pipeline.commands.gradcheck.run_gradcheck",
        lambda **_: report,
    )

    assert run(["gradcheck", "--out", str(tmp_path)]) == 0
    assert _read_run_record(tmp_path)["results"]["groups"] == {"stage2/k": 0.0}


def test_unexpected_error(
    monkeypatch: MonkeyPatch, config_dir: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Exceptions outside the hierarchy exit with the internal error status."""

    def broken() -> None:
        raise RuntimeError("display unavailable")

    monkeypatch.setattr("hybrid_inverse_render.main.create_display", broken)
    argv = ["synth", "--config", str(config_dir / "test_config.json"), "--out", str(tmp_path)]

    assert run(argv) == EXIT_INTERNAL_ERROR
    assert "unexpected error" in capsys.readouterr().out


def test_main_exits_with_run_status(monkeypatch: MonkeyPatch) -> None:
    """The console script passes argv on and exits with the status."""
    monkeypatch.setattr(sys, "argv", ["hybrid_inverse_render", "--version"])

    with pytest.raises(SystemExit) as exc_info:
        main()

    assert exc_info.value.code == 0


@pytest.mark.slow
def test_full_pipeline(config_dir: Path, tmp_path: Path) -> None:
    """synth, fit, render, export and relight chain on the tiny configuration."""
    config = ["--config", str(config_dir / "test_config.json")]
    data, fitted = tmp_path / "data", tmp_path / "fit"

    assert run(["synth", *config, "--out", str(data)]) == 0
    assert run(["fit", *config, "--data", str(data), "--out", str(fitted)]) == 0
    assert (fitted / "scene" / "fit.json").is_file()
    metrics = json.loads((fitted / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["held_out"] is False

    render_args = ["--scene", str(fitted), "--data", str(data), "--frame", "all", "--buffers"]
    assert run(["render", *config, *render_args, "--out", str(tmp_path / "render")]) == 0
    assert (tmp_path / "render" / "render_0003.png").is_file()
    assert (tmp_path / "render" / "render_0000_normal.png").is_file()

    export_args = ["--scene", str(fitted), "--data", str(data), "--out", str(tmp_path / "mesh")]
    assert run(["export", *config, *export_args]) == 0
    assert (tmp_path / "mesh" / "head.obj").is_file()

    env = tmp_path / "env.json"
    env.write_text(json.dumps({"coefficients": [1.0] + [0.0] * 8}), encoding="utf-8")
    relight_args = ["--scene", str(fitted), "--data", str(data), "--target-env", str(env)]
    assert run(["relight", *config, *relight_args, "--out", str(tmp_path / "relit")]) == 0
    assert (tmp_path / "relit" / "relit" / "0000.png").is_file()
    assert (tmp_path / "relit" / "sh_weights.json").is_file()
