from __future__ import annotations

from pydantic import BaseModel, Field

from .enums import SegmentationMode, TerminationReason


class MetricReport(BaseModel):
    dice: float = Field(ge=0, le=1)
    jaccard: float = Field(ge=0, le=1)
    true_positives: int = Field(ge=0)
    false_positives: int = Field(ge=0)
    false_negatives: int = Field(ge=0)


class ModeSummary(BaseModel):
    mode: SegmentationMode
    iterations: int
    reason: TerminationReason
    wall_time_s: float
    vessel_pixels: int
    dice: float | None = None


class ComparisonReport(BaseModel):
    tfa: ModeSummary
    tfae: ModeSummary
    difference_pixels: int
    first_step_containment: bool
