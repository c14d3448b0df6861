from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image as PILImage
from sentry_sdk.integrations.logging import LoggingIntegration
from typer.testing import CliRunner

from vesselseg import cli as cli_module
from vesselseg.cli import app
from vesselseg.config import Settings
from vesselseg.observability import errors as errors_module
from vesselseg.services.phantom import phantom_spec


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner(mix_stderr=False)


@pytest.fixture()
def phantom_files(runner: CliRunner, tmp_path: Path) -> tuple[Path, Path]:
    image_path = tmp_path / "phantom.png"
    truth_path = tmp_path / "truth.png"
    result = runner.invoke(
        app,
        [
            "phantom",
            "--output", str(image_path),
            "--truth", str(truth_path),
            "--family", "straight",
            "--width", "64",
            "--height", "64",
            "--seed", "3",
        ],
    )
    assert result.exit_code == 0, result.stderr
    return image_path, truth_path


def test_phantom_command_is_deterministic(runner, phantom_files, tmp_path) -> None:
    image_path, truth_path = phantom_files
    again = tmp_path / "again.png"
    again_truth = tmp_path / "again_truth.png"
    result = runner.invoke(
        app,
        ["phantom", "-o", str(again), "--truth", str(again_truth), "--family", "straight", "--width", "64", "--height", "64", "--seed", "3"],
    )
    assert result.exit_code == 0
    assert again.read_bytes() == image_path.read_bytes()
    assert again_truth.read_bytes() == truth_path.read_bytes()
    assert json.loads(result.stdout)["tubes"] == 1


def test_phantom_with_no_tubes_has_empty_truth(runner, tmp_path) -> None:
    truth_path = tmp_path / "truth.png"
    result = runner.invoke(
        app, ["phantom", "-o", str(tmp_path / "img.png"), "--truth", str(truth_path), "--family", "empty", "--width", "32", "--height", "32"]
    )
    assert result.exit_code == 0
    assert not np.asarray(PILImage.open(truth_path)).any()


def test_phantom_rejects_unknown_family_and_small_size(runner, tmp_path) -> None:
    base = ["phantom", "-o", str(tmp_path / "a.png"), "--truth", str(tmp_path / "b.png")]
    assert runner.invoke(app, base + ["--family", "spiral"]).exit_code == 2
    assert runner.invoke(app, base + ["--width", "16"]).exit_code == 2


def test_segment_writes_mask_and_trace(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    mask_path = tmp_path / "mask.png"
    trace_path = tmp_path / "trace.jsonl"
    result = runner.invoke(app, ["segment", "-i", str(image_path), "-o", str(mask_path), "--trace", str(trace_path)])

    assert result.exit_code == 0, result.stderr
    summary = json.loads(result.stdout)
    assert summary["mode"] == "tfae"
    assert set(np.unique(np.asarray(PILImage.open(mask_path))).tolist()) <= {0, 255}

    records = [json.loads(line) for line in trace_path.read_text().splitlines()]
    assert len(records) == summary["iterations"]
    assert records[-1]["reason"] == summary["reason"]


def test_segment_is_byte_identical_across_runs(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    outputs = []
    for name in ("first", "second"):
        mask_path = tmp_path / f"{name}.png"
        trace_path = tmp_path / f"{name}.jsonl"
        result = runner.invoke(app, ["segment", "-i", str(image_path), "-o", str(mask_path), "--trace", str(trace_path)])
        assert result.exit_code == 0
        outputs.append((mask_path.read_bytes(), trace_path.read_bytes()))
    assert outputs[0] == outputs[1]


def test_segment_missing_input_exits_with_io_error(runner, tmp_path) -> None:
    mask_path = tmp_path / "mask.png"
    result = runner.invoke(app, ["segment", "-i", str(tmp_path / "missing.png"), "-o", str(mask_path)])
    assert result.exit_code == 1
    assert "Unable to read image" in result.stderr
    assert not mask_path.exists()


def test_segment_rejects_bad_flags(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    mask = str(tmp_path / "mask.png")
    assert runner.invoke(app, ["segment", "-i", str(image_path), "-o", mask, "--mode", "fast"]).exit_code == 2
    assert runner.invoke(app, ["segment", "-i", str(image_path), "-o", mask, "--sigma", "0"]).exit_code == 2
    assert runner.invoke(app, ["segment", "-i", str(image_path), "-o", mask, "--unknown"]).exit_code == 2
    assert runner.invoke(app, ["segment", "-i", str(image_path)]).exit_code == 2


def test_config_file_supplies_values_and_flags_win(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    config_path = tmp_path / "run.env"
    config_path.write_text(f"input={image_path}\nmode=tfa\nmax-iters=20\n", encoding="utf-8")

    from_file = runner.invoke(app, ["segment", "-o", str(tmp_path / "a.png"), "--config", str(config_path)])
    assert from_file.exit_code == 0, from_file.stderr
    assert json.loads(from_file.stdout)["mode"] == "tfa"

    overridden = runner.invoke(app, ["segment", "-o", str(tmp_path / "b.png"), "--mode", "tfae", "--config", str(config_path)])
    assert overridden.exit_code == 0
    assert json.loads(overridden.stdout)["mode"] == "tfae"


def test_config_file_rejects_unknown_keys(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    config_path = tmp_path / "bad.env"
    config_path.write_text("turbo=yes\n", encoding="utf-8")
    result = runner.invoke(app, ["segment", "-i", str(image_path), "-o", str(tmp_path / "m.png"), "--config", str(config_path)])
    assert result.exit_code == 2


def test_metrics_reports_json(runner, phantom_files) -> None:
    _, truth_path = phantom_files
    result = runner.invoke(app, ["metrics", "--pred", str(truth_path), "--truth", str(truth_path)])
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["dice"] == 1.0
    assert set(report) == {"dice", "jaccard", "true_positives", "false_positives", "false_negatives"}


def test_metrics_size_mismatch_exits_2(runner, phantom_files, tmp_path) -> None:
    _, truth_path = phantom_files
    other = tmp_path / "other.png"
    PILImage.fromarray(np.zeros((40, 32), dtype=np.uint8)).save(other)
    result = runner.invoke(app, ["metrics", "--pred", str(other), "--truth", str(truth_path)])
    assert result.exit_code == 2


def test_compare_writes_report_and_difference(runner, phantom_files, tmp_path) -> None:
    image_path, truth_path = phantom_files
    diff_path = tmp_path / "diff.png"
    result = runner.invoke(app, ["compare", "-i", str(image_path), "--truth", str(truth_path), "--diff", str(diff_path)])

    assert result.exit_code == 0, result.stderr
    report = json.loads(result.stdout)
    assert report["tfa"]["mode"] == "tfa"
    assert report["tfae"]["mode"] == "tfae"
    assert report["tfae"]["dice"] is not None
    assert report["first_step_containment"] is True
    assert diff_path.exists()
    assert int((np.asarray(PILImage.open(diff_path)) > 0).sum()) == report["difference_pixels"]


def _write_gray_png(path: Path, values: np.ndarray) -> Path:
    PILImage.fromarray(values.astype(np.uint8)).save(path)
    return path


def test_segment_handles_images_smaller_than_the_kernel(runner, tmp_path) -> None:
    rng = np.random.default_rng(8)
    image_path = _write_gray_png(tmp_path / "tiny.png", rng.integers(0, 256, size=(8, 8)))
    mask_path = tmp_path / "tiny_mask.png"

    result = runner.invoke(app, ["segment", "-i", str(image_path), "-o", str(mask_path)])
    assert result.exit_code == 0, result.stderr
    assert np.asarray(PILImage.open(mask_path)).shape == (8, 8)


def test_segment_rejects_images_the_frame_cannot_resolve(runner, tmp_path) -> None:
    image_path = _write_gray_png(tmp_path / "speck.png", np.full((3, 3), 128))
    mask_path = tmp_path / "speck_mask.png"

    result = runner.invoke(app, ["segment", "-i", str(image_path), "-o", str(mask_path)])
    assert result.exit_code == 2
    assert "small" in result.stderr
    assert not mask_path.exists()

    compared = runner.invoke(app, ["compare", "-i", str(image_path)])
    assert compared.exit_code == 2


def test_debug_dir_holds_three_class_first_step(runner, phantom_files, tmp_path) -> None:
    image_path, _ = phantom_files
    debug_dir = tmp_path / "debug"
    trace_path = tmp_path / "trace.jsonl"
    result = runner.invoke(
        app,
        ["segment", "-i", str(image_path), "-o", str(tmp_path / "m.png"), "--trace", str(trace_path), "--debug-dir", str(debug_dir)],
    )
    assert result.exit_code == 0, result.stderr

    classes = np.asarray(PILImage.open(debug_dir / "first_step.png"))
    assert set(np.unique(classes).tolist()) <= {0, 128, 255}
    records = [json.loads(line) for line in trace_path.read_text().splitlines()]
    undecided_after_first_step = records[1]["active_count"] if len(records) > 1 else 0
    assert int((classes == 128).sum()) == undecided_after_first_step


def test_phantom_spec_file_takes_seed_from_config(runner, tmp_path) -> None:
    spec_path = tmp_path / "tube.json"
    spec_path.write_text(phantom_spec("straight", 48, 48, noise_sigma=0.1, rng_seed=0).model_dump_json(), encoding="utf-8")
    config_path = tmp_path / "phantom.env"
    config_path.write_text("seed=7\n", encoding="utf-8")

    def render_to(name: str, *extra: str) -> bytes:
        output = tmp_path / f"{name}.png"
        result = runner.invoke(app, ["phantom", "-o", str(output), "--truth", str(tmp_path / f"{name}_truth.png"), "--spec", str(spec_path), *extra])
        assert result.exit_code == 0, result.stderr
        return output.read_bytes()

    from_config = render_to("config", "--config", str(config_path))
    from_flag = render_to("flag", "--seed", "7")
    from_file = render_to("file")
    assert from_config == from_flag
    assert from_config != from_file


def test_error_reporting_starts_when_dsn_is_configured(runner, phantom_files, monkeypatch) -> None:
    _, truth_path = phantom_files
    calls: list[dict[str, object]] = []
    monkeypatch.setattr(errors_module.sentry_sdk, "init", lambda **kwargs: calls.append(kwargs))
    monkeypatch.setattr(
        cli_module,
        "settings",
        Settings(SENTRY_DSN="https://public@sentry.example.invalid/1", APP_ENV="test", SENTRY_TRACES_SAMPLE_RATE=0.25),
    )

    result = runner.invoke(app, ["metrics", "--pred", str(truth_path), "--truth", str(truth_path)])

    assert result.exit_code == 0, result.stderr
    (kwargs,) = calls
    assert kwargs["dsn"] == "https://public@sentry.example.invalid/1"
    assert kwargs["environment"] == "test"
    assert kwargs["traces_sample_rate"] == 0.25
    assert any(isinstance(integration, LoggingIntegration) for integration in kwargs["integrations"])


def test_error_reporting_stays_off_without_dsn(runner, phantom_files, monkeypatch) -> None:
    _, truth_path = phantom_files
    calls: list[dict[str, object]] = []
    monkeypatch.setattr(errors_module.sentry_sdk, "init", lambda **kwargs: calls.append(kwargs))
    monkeypatch.setattr(cli_module, "settings", Settings(SENTRY_DSN="  "))

    result = runner.invoke(app, ["metrics", "--pred", str(truth_path), "--truth", str(truth_path)])

    assert result.exit_code == 0
    assert cli_module.settings.sentry_dsn is None
    assert calls == []
