from __future__ import annotations

import json
from pathlib import Path
from typing import Any, NoReturn, Optional, TypeVar

import typer
from pydantic import BaseModel, ValidationError

from .config import (
    CompareOptions,
    ConfigFileError,
    MetricsOptions,
    PhantomOptions,
    SegmentOptions,
    load_config_file,
    settings,
)
from .models.enums import Channel, SegmentationMode, SureMode
from .models.frames import FrameFamily
from .models.image import Image
from .observability.errors import init_error_reporting
from .observability.logging import configure_logging
from .services import compare as compare_service
from .services import segmenter
from .services.image_core import DimensionError, ImageFormatError, ImageIOError, load_image, load_mask, save_image, save_mask
from .services.phantom import PhantomSpecError, load_phantom_spec, phantom_spec, render
from .services.scoring import score
from .services.tight_frame import TransformParameterError

app = typer.Typer(help="Tight-frame vessel segmentation CLI", no_args_is_help=True)

OptionsT = TypeVar("OptionsT", bound=BaseModel)


def _run_defaults() -> dict[str, Any]:
    return {
        "mode": settings.mode,
        "transform": settings.transform,
        "sigma": settings.sigma,
        "epsilon": settings.epsilon,
        "max_iters": settings.max_iterations,
        "channel": settings.channel,
        "sure_mode": settings.sure_mode,
    }


def _build_options(
    model: type[OptionsT],
    config: Optional[Path],
    flags: dict[str, Any],
    defaults: dict[str, Any] | None = None,
) -> OptionsT:
    """Merge defaults, then ``--config`` values, then explicit flags, and validate."""
    merged: dict[str, Any] = dict(defaults or {})
    try:
        if config is not None:
            merged.update(load_config_file(config, set(model.model_fields)))
        merged.update({name: value for name, value in flags.items() if value is not None})
        return model.model_validate(merged)
    except (ConfigFileError, FileNotFoundError) as exc:
        raise typer.BadParameter(str(exc), param_hint="--config") from exc
    except ValidationError as exc:
        details = "; ".join(f"{'.'.join(str(part) for part in err['loc']) or 'options'}: {err['msg']}" for err in exc.errors())
        raise typer.BadParameter(details) from exc


def _fail(message: str) -> NoReturn:
    typer.echo(message, err=True)
    raise typer.Exit(code=1)


def _load_input(path: Path, channel: Channel) -> Image:
    try:
        return load_image(path, channel)
    except (ImageIOError, ImageFormatError) as exc:
        _fail(str(exc))


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level (default from VESSELSEG_LOG_LEVEL)"),
) -> None:
    configure_logging(log_level or settings.log_level)
    init_error_reporting(settings.sentry_dsn, settings.environment, settings.sentry_traces_sample_rate)


@app.command()
def segment(
    input: Optional[Path] = typer.Option(None, "--input", "-i", help="Input PNG/PGM/JPEG image"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Mask PNG to write"),
    mode: Optional[SegmentationMode] = typer.Option(None, "--mode", help="tfa or tfae (default tfae)"),
    transform: Optional[FrameFamily] = typer.Option(None, "--transform", help="framelet or curvelet"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Derivative scale (default 2)"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Gradient floor for the initial set (default 0.02)"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap (default 50)"),
    channel: Optional[Channel] = typer.Option(None, "--channel", help="Channel used for color input (default green)"),
    sure_mode: Optional[SureMode] = typer.Option(None, "--sure-mode", help="Values the threshold search runs on"),
    sure_mad: Optional[bool] = typer.Option(None, "--sure-mad/--no-sure-mad", help="Normalize the threshold search by a robust noise estimate"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Write the iteration trace as JSON lines"),
    debug_dir: Optional[Path] = typer.Option(None, "--debug-dir", help="Write gradient, orientation, band and risk-curve artifacts"),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value file mirroring these flags"),
) -> None:
    """Segment vessels in one image and write a 0/255 mask."""
    flags = dict(
        input=input,
        output=output,
        mode=mode,
        transform=transform,
        sigma=sigma,
        epsilon=epsilon,
        max_iters=max_iters,
        channel=channel,
        sure_mode=sure_mode,
        sure_mad=sure_mad,
        trace=trace,
        debug_dir=debug_dir,
    )
    options = _build_options(SegmentOptions, config, flags, _run_defaults())
    img = _load_input(options.input, options.channel)

    try:
        mask, run_trace = segmenter.run(img, options.segmenter_config(), debug_dir=options.debug_dir)
        save_mask(mask, options.output)
        if options.trace is not None:
            run_trace.write(options.trace)
    except (DimensionError, TransformParameterError) as exc:
        raise typer.BadParameter(str(exc), param_hint="--input") from exc
    except ImageIOError as exc:
        _fail(str(exc))

    summary = {
        "mode": options.mode.value,
        "iterations": run_trace.iterations,
        "reason": run_trace.reason.value,
        "vessel_pixels": int(mask.values.sum()),
    }
    typer.echo(json.dumps(summary))


@app.command()
def phantom(
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Phantom image PNG to write"),
    truth: Optional[Path] = typer.Option(None, "--truth", help="Ground-truth mask PNG to write"),
    family: Optional[str] = typer.Option(None, "--family", help="straight, faint-branch, dark-junction, gapped or empty"),
    width: Optional[int] = typer.Option(None, "--width", help="Width in pixels (>= 32)"),
    height: Optional[int] = typer.Option(None, "--height", help="Height in pixels (>= 32)"),
    noise: Optional[float] = typer.Option(None, "--noise", help="Additive Gaussian noise std"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Noise seed"),
    spec: Optional[Path] = typer.Option(None, "--spec", help="JSON phantom description instead of a family"),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value file mirroring these flags"),
) -> None:
    """Render a synthetic tube phantom and its truth mask."""
    flags = dict(output=output, truth=truth, family=family, width=width, height=height, noise=noise, seed=seed, spec=spec)
    options = _build_options(PhantomOptions, config, flags)

    try:
        if options.spec is not None:
            seed_override = options.seed if "seed" in options.model_fields_set else None
            phantom_description = load_phantom_spec(options.spec, rng_seed=seed_override)
        else:
            phantom_description = phantom_spec(
                options.family,
                width=options.width,
                height=options.height,
                noise_sigma=options.noise,
                rng_seed=options.seed,
            )
    except PhantomSpecError as exc:
        raise typer.BadParameter(str(exc)) from exc
    except OSError as exc:
        _fail(f"Unable to read phantom spec {options.spec}: {exc}")

    img, truth_mask = render(phantom_description)
    try:
        save_image(img, options.output)
        save_mask(truth_mask, options.truth)
    except ImageIOError as exc:
        _fail(str(exc))

    typer.echo(
        json.dumps(
            {
                "width": phantom_description.width,
                "height": phantom_description.height,
                "tubes": len(phantom_description.tubes),
                "vessel_pixels": int(truth_mask.values.sum()),
            }
        )
    )


@app.command()
def metrics(
    pred: Optional[Path] = typer.Option(None, "--pred", help="Predicted mask PNG"),
    truth: Optional[Path] = typer.Option(None, "--truth", help="Ground-truth mask PNG"),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value file mirroring these flags"),
) -> None:
    """Print Dice, Jaccard and confusion counts as JSON."""
    options = _build_options(MetricsOptions, config, dict(pred=pred, truth=truth))
    try:
        predicted = load_mask(options.pred)
        actual = load_mask(options.truth)
    except ImageIOError as exc:
        _fail(str(exc))

    try:
        report = score(predicted, actual)
    except DimensionError as exc:
        raise typer.BadParameter(str(exc)) from exc
    typer.echo(report.model_dump_json())


@app.command()
def compare(
    input: Optional[Path] = typer.Option(None, "--input", "-i", help="Input PNG/PGM/JPEG image"),
    truth: Optional[Path] = typer.Option(None, "--truth", help="Optional ground-truth mask for per-mode Dice"),
    diff: Optional[Path] = typer.Option(None, "--diff", help="Write pixels found only with the coherence clause"),
    transform: Optional[FrameFamily] = typer.Option(None, "--transform", help="framelet or curvelet"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Derivative scale (default 2)"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Gradient floor for the initial set (default 0.02)"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration cap (default 50)"),
    channel: Optional[Channel] = typer.Option(None, "--channel", help="Channel used for color input (default green)"),
    sure_mode: Optional[SureMode] = typer.Option(None, "--sure-mode", help="Values the threshold search runs on"),
    sure_mad: Optional[bool] = typer.Option(None, "--sure-mad/--no-sure-mad", help="Normalize the threshold search by a robust noise estimate"),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value file mirroring these flags"),
) -> None:
    """Run tfa and tfae with identical settings and report both as JSON."""
    flags = dict(
        input=input,
        truth=truth,
        diff=diff,
        transform=transform,
        sigma=sigma,
        epsilon=epsilon,
        max_iters=max_iters,
        channel=channel,
        sure_mode=sure_mode,
        sure_mad=sure_mad,
    )
    options = _build_options(CompareOptions, config, flags, _run_defaults())
    img = _load_input(options.input, options.channel)

    try:
        truth_mask = load_mask(options.truth) if options.truth is not None else None
        if truth_mask is not None and truth_mask.shape != img.shape:
            raise typer.BadParameter(f"Truth mask {truth_mask.shape} does not match image {img.shape}", param_hint="--truth")
        report, difference = compare_service.compare_modes(img, options.segmenter_config(), truth=truth_mask)
        if options.diff is not None:
            save_mask(difference, options.diff)
    except (DimensionError, TransformParameterError) as exc:
        raise typer.BadParameter(str(exc), param_hint="--input") from exc
    except ImageIOError as exc:
        _fail(str(exc))

    typer.echo(report.model_dump_json())


if __name__ == "__main__":
    app()
