from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class FrameFamily(str, Enum):
    FRAMELET = "framelet"
    CURVELET = "curvelet"


class TransformKind(BaseModel):
    """Transform family selector.

    ``scales`` counts the coarse band as one scale; ``None`` picks 3 for images at least 64
    pixels on the short side and 2 below. ``orientations`` is the curvelet wedge count over
    the full circle at the second-coarsest scale (doubling every other scale); opposite
    wedges are paired into one real band, so a scale carries ``orientations // 2`` bands.
    """

    model_config = ConfigDict(frozen=True)

    family: FrameFamily = FrameFamily.FRAMELET
    scales: int | None = Field(default=None, ge=2)
    orientations: int = Field(default=8, ge=4)

    @field_validator("orientations")
    @classmethod
    def _even_orientations(cls, value: int) -> int:
        if value % 2:
            raise ValueError("orientations must be even so opposite wedges pair up")
        return value

    def resolved_scales(self, shape: tuple[int, int]) -> int:
        if self.scales is not None:
            return self.scales
        return 3 if min(shape) >= 64 else 2


@dataclass(frozen=True)
class Band:
    scale: int
    orientation: int
    is_coarse: bool
    values: np.ndarray


@dataclass(frozen=True)
class FrameCoefficients:
    bands: tuple[Band, ...]
    geometry: tuple[int, int]
    family: FrameFamily
    scales: int
    orientations: int

    @property
    def coarse(self) -> Band:
        return next(band for band in self.bands if band.is_coarse)

    @property
    def details(self) -> tuple[Band, ...]:
        return tuple(band for band in self.bands if not band.is_coarse)

    @property
    def finest_scale(self) -> int:
        return max(band.scale for band in self.bands)

    def energy(self) -> float:
        return float(sum(np.sum(band.values**2) for band in self.bands))
