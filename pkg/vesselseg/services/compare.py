from __future__ import annotations

import logging

import numpy as np

from ..config import SegmenterConfig
from ..models.enums import SegmentationMode
from ..models.image import BinaryMask, Image
from ..models.reports import ComparisonReport, ModeSummary
from ..models.trace import IterationTrace
from . import segmenter
from .scoring import score

logger = logging.getLogger(__name__)


def _summary(
    mode: SegmentationMode,
    mask: BinaryMask,
    trace: IterationTrace,
    truth: BinaryMask | None,
) -> ModeSummary:
    return ModeSummary(
        mode=mode,
        iterations=trace.iterations,
        reason=trace.reason,
        wall_time_s=trace.wall_time_s,
        vessel_pixels=int(np.count_nonzero(mask.values)),
        dice=score(mask, truth).dice if truth is not None else None,
    )


def first_step_containment(img: Image, cfg: SegmenterConfig) -> bool:
    """True when every iteration-0 vessel pixel of the baseline is also one with the coherence clause."""
    baseline, _, _ = segmenter.first_step(img, cfg.model_copy(update={"mode": SegmentationMode.TFA}))
    coherent, _, _ = segmenter.first_step(img, cfg.model_copy(update={"mode": SegmentationMode.TFAE}))
    return bool(np.all(~(baseline.data == 1.0) | (coherent.data == 1.0)))


def covers_baseline_in_region(candidate: BinaryMask, baseline: BinaryMask, region: BinaryMask) -> bool:
    """True when every baseline vessel pixel inside ``region`` is also a candidate vessel pixel."""
    missed = baseline.vessel & region.vessel & ~candidate.vessel
    return not bool(missed.any())


def compare_modes(
    img: Image,
    cfg: SegmenterConfig,
    truth: BinaryMask | None = None,
) -> tuple[ComparisonReport, BinaryMask]:
    """Run both modes with otherwise identical settings.

    Returns the report and the mask of pixels that are vessel with the coherence clause
    but not without it.
    """
    results: dict[SegmentationMode, tuple[BinaryMask, IterationTrace]] = {}
    for mode in (SegmentationMode.TFA, SegmentationMode.TFAE):
        results[mode] = segmenter.run(img, cfg.model_copy(update={"mode": mode}))

    tfa_mask, tfa_trace = results[SegmentationMode.TFA]
    tfae_mask, tfae_trace = results[SegmentationMode.TFAE]
    difference = BinaryMask.from_bool(tfae_mask.vessel & ~tfa_mask.vessel)

    report = ComparisonReport(
        tfa=_summary(SegmentationMode.TFA, tfa_mask, tfa_trace, truth),
        tfae=_summary(SegmentationMode.TFAE, tfae_mask, tfae_trace, truth),
        difference_pixels=int(np.count_nonzero(difference.values)),
        first_step_containment=first_step_containment(img, cfg),
    )
    logger.info(
        "Compared modes: tfa %d iterations, tfae %d iterations, %d extra vessel pixels",
        report.tfa.iterations,
        report.tfae.iterations,
        report.difference_pixels,
    )
    return report, difference
