from __future__ import annotations

import numpy as np

from ..models.image import BinaryMask
from ..models.reports import MetricReport
from .image_core import DimensionError


def score(pred: BinaryMask, truth: BinaryMask) -> MetricReport:
    """Overlap of two vessel masks; both scores are 1 when neither mask has vessel pixels."""
    if pred.shape != truth.shape:
        raise DimensionError(f"Mask sizes differ: prediction {pred.shape}, truth {truth.shape}")

    predicted, actual = pred.vessel, truth.vessel
    tp = int(np.count_nonzero(predicted & actual))
    fp = int(np.count_nonzero(predicted & ~actual))
    fn = int(np.count_nonzero(~predicted & actual))

    denominator = tp + fp + fn
    if denominator == 0:
        return MetricReport(dice=1.0, jaccard=1.0, true_positives=0, false_positives=0, false_negatives=0)
    return MetricReport(
        dice=2 * tp / (2 * tp + fp + fn),
        jaccard=tp / denominator,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
    )
