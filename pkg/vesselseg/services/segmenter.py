"""Tight-frame vessel segmentation with an eigenvector-coherence vessel clause.

Each iteration classifies the active pixels into background, vessel or undecided, stretches
the undecided ones over [0, 1] and denoises them with a SURE-thresholded tight frame. The
active set only ever shrinks; the run ends once it is empty.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import SegmenterConfig
from ..models.enums import SegmentationMode, TerminationReason
from ..models.fields import EigenField, VectorField
from ..models.image import BinaryMask, Image, PixelSet
from ..models.trace import DecisionParams, IterationRecord, IterationTrace
from ..observability.logging import RunLogger, log_event
from .image_core import blend_on_set, save_class_map, unvec, vec, write_heatmap
from .scale_space import coherence_map, gradient_field, hessian_eigen, orientation_angle, smooth
from .sure import dump_risk_curve, select_threshold
from .tight_frame import band_filters, decompose, dump_bands, hard_threshold, reconstruct

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedState:
    """Everything fixed before the first iteration."""

    image: Image
    grad: VectorField
    eigen: EigenField
    active: PixelSet


def initial_active_set(grad: VectorField, epsilon: float) -> PixelSet:
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, received {epsilon}")
    return PixelSet(grad.magnitude >= epsilon)


def max_gradient_pixel(grad: VectorField, active: PixelSet) -> tuple[tuple[int, int], float]:
    """Active pixel of largest gradient magnitude; ties go to the smallest row, then column."""
    if active.is_empty:
        raise ValueError("max_gradient_pixel needs a nonempty active set")
    masked = np.where(active.members, grad.magnitude, -np.inf)
    row, col = np.unravel_index(int(np.argmax(masked)), masked.shape)
    return (int(row), int(col)), float(masked[row, col])


def decision_params(f_i: Image, active: PixelSet, eigen: EigenField, grad: VectorField) -> DecisionParams:
    values = f_i.data[active.members]
    if values.size == 0:
        raise ValueError("decision_params needs a nonempty active set")

    low, high = float(values.min()), float(values.max())
    # Summation rounding may push a mean past its bounds.
    mean = min(max(float(values.mean()), low), high)
    mean_p = max(float(values[values >= mean].mean()), mean)
    mean_n = min(float(values[values <= mean].mean()), mean)

    max_p, max_g = max_gradient_pixel(grad, active)
    mean_coherence = float(coherence_map(eigen, max_p)[active.members].mean())

    return DecisionParams(
        mean_coherence=mean_coherence,
        M=mean,
        M_p=mean_p,
        M_n=mean_n,
        alpha=max((mean + mean_n) / 2.0, 0.0),
        beta=min((mean + mean_p) / 2.0, 1.0),
        max_p=max_p,
        max_g=max_g,
    )


def threshold_step(
    f_i: Image,
    active: PixelSet,
    params: DecisionParams,
    eigen: EigenField,
    mode: SegmentationMode | str,
) -> tuple[Image, PixelSet]:
    """Classify active pixels; pixels outside ``active`` keep their value."""
    f = f_i.data
    inside = active.members

    to_zero = inside & (f <= params.alpha)
    to_one = inside & ~to_zero & (f >= params.beta)
    if SegmentationMode(mode) is SegmentationMode.TFAE:
        coherent = coherence_map(eigen, params.max_p) >= params.mean_coherence
        to_one |= inside & ~to_zero & (f >= params.M) & coherent
    undecided = inside & ~to_zero & ~to_one

    result = f.copy()
    result[to_zero] = 0.0
    result[to_one] = 1.0

    band = inside & (f >= params.alpha) & (f <= params.beta)
    if undecided.any():
        band_values = f[band]
        low = float(band_values.min()) if band_values.size else 0.0
        high = float(band_values.max()) if band_values.size else 0.0
        if band_values.size and high > low:
            result[undecided] = np.clip((f[undecided] - low) / (high - low), 0.0, 1.0)
        else:
            result[undecided] = np.where(f[undecided] >= params.M, 1.0, 0.0)

    next_active = PixelSet(undecided & (result > 0.0) & (result < 1.0))
    return Image(result), next_active


def denoise_with_threshold(
    f_t: Image,
    next_active: PixelSet,
    cfg: SegmenterConfig,
    debug_dir: Path | None = None,
) -> tuple[Image, float | None]:
    """Denoise the whole image, keep the result only on ``next_active``; also returns lambda."""
    if next_active.is_empty:
        return f_t, None

    coeffs = decompose(f_t, cfg.transform)
    lam, curve = select_threshold(coeffs, f_t, cfg.sure_mode, normalize=cfg.sure_mad)
    denoised = reconstruct(hard_threshold(coeffs, lam), cfg.transform)

    if debug_dir is not None:
        dump_bands(coeffs, debug_dir / "bands")
        dump_risk_curve(curve, debug_dir / "risk_curve.csv")

    blended = blend_on_set(vec(f_t), vec(denoised), next_active)
    return Image.clamped(unvec(blended, f_t.shape)), lam


def denoise_step(f_t: Image, next_active: PixelSet, cfg: SegmenterConfig) -> Image:
    return denoise_with_threshold(f_t, next_active, cfg)[0]


def seed(img: Image, cfg: SegmenterConfig) -> SeedState:
    """Derivatives of the input plus the initial active set.

    Pixels outside the initial set are classified here, once, by comparing the smoothed
    input with the mean intensity over the initial set.
    """
    grad = gradient_field(img, cfg.sigma)
    eigen = hessian_eigen(img, cfg.sigma)
    active = initial_active_set(grad, cfg.epsilon)
    if active.is_empty:
        return SeedState(image=img, grad=grad, eigen=eigen, active=active)

    seeded_mean = float(img.data[active.members].mean())
    outside = np.where(smooth(img, cfg.sigma) >= seeded_mean, 1.0, 0.0)
    f0 = np.where(active.members, img.data, outside)
    return SeedState(image=Image(f0), grad=grad, eigen=eigen, active=active)


def first_step(img: Image, cfg: SegmenterConfig) -> tuple[Image, PixelSet, DecisionParams | None]:
    """Iteration-0 classification for ``cfg.mode``, before any denoising."""
    state = seed(img, cfg)
    if state.active.is_empty:
        return Image(np.where(img.data >= 0.5, 1.0, 0.0)), state.active, None
    params = decision_params(state.image, state.active, state.eigen, state.grad)
    f_t, next_active = threshold_step(state.image, state.active, params, state.eigen, cfg.mode)
    return f_t, next_active, params


def _binarize_remaining(f: Image, active: PixelSet, level: float) -> Image:
    data = np.where(active.members, np.where(f.data >= level, 1.0, 0.0), f.data)
    return Image(data)


def _write_seed_artifacts(state: SeedState, debug_dir: Path) -> None:
    write_heatmap(state.grad.magnitude, debug_dir / "gradient_magnitude.png")
    write_heatmap(orientation_angle(state.eigen), debug_dir / "orientation.png")


def run(
    img: Image,
    cfg: SegmenterConfig,
    debug_dir: Path | None = None,
) -> tuple[BinaryMask, IterationTrace]:
    trace = IterationTrace()
    with RunLogger({"mode": cfg.mode.value, "transform": cfg.transform.family.value, "shape": list(img.shape)}) as run_log:
        # Fail fast on grids the frame cannot resolve.
        band_filters(cfg.transform, img.shape)
        state = seed(img, cfg)
        if debug_dir is not None:
            _write_seed_artifacts(state, debug_dir)

        if state.active.is_empty:
            trace.reason = TerminationReason.EMPTY_SET
            run_log.update(iterations=0, reason=trace.reason.value)
            return BinaryMask.from_bool(img.data >= 0.5), trace

        f = state.image
        active = state.active
        stalled = 0
        for iteration in range(cfg.max_iterations):
            started = time.perf_counter()
            params = decision_params(f, active, state.eigen, state.grad)
            f_t, next_active = threshold_step(f, active, params, state.eigen, cfg.mode)
            if __debug__:
                assert next_active.issubset(active), "active set must shrink monotonically"
            dump_dir = debug_dir if iteration == 0 else None
            if dump_dir is not None:
                save_class_map(f_t, dump_dir / "first_step.png")
            f, lam = denoise_with_threshold(f_t, next_active, cfg, dump_dir)

            record = IterationRecord(
                iteration=iteration,
                active_count=active.cardinality,
                next_active_count=next_active.cardinality,
                params=params,
                lambda_thresh=lam,
                wall_time_s=time.perf_counter() - started,
            )
            trace.append(record)
            log_event(logger, {"event": "segmentation_iteration", **record.to_payload()}, level=logging.DEBUG)

            if next_active.is_empty:
                trace.reason = TerminationReason.EMPTY_SET
                break

            stalled = stalled + 1 if next_active.cardinality == active.cardinality else 0
            active = next_active
            if stalled >= cfg.stall_patience:
                f = _binarize_remaining(f, active, params.M)
                trace.reason = TerminationReason.STALL_FALLBACK
                break
        else:
            remaining_mean = float(f.data[active.members].mean())
            f = _binarize_remaining(f, active, remaining_mean)
            trace.reason = TerminationReason.MAX_ITERATIONS

        run_log.update(iterations=trace.iterations, reason=trace.reason.value)
        return BinaryMask.from_bool(f.data >= 0.5), trace
