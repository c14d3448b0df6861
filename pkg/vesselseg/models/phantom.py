from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class TubeSpec(BaseModel):
    """One tube: a polyline of ``(x, y)`` control points with a constant radius.

    Intensity tapers linearly along the polyline from ``peak`` to ``end_peak`` when the
    latter is given; ``faint_branch`` only labels the tube for branch-level scoring.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    points: list[tuple[float, float]] = Field(min_length=2)
    radius: float = Field(gt=0)
    peak: float = Field(ge=0, le=1)
    end_peak: float | None = Field(default=None, ge=0, le=1)
    faint_branch: bool = False


class PhantomSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    width: int = Field(ge=32)
    height: int = Field(ge=32)
    tubes: list[TubeSpec] = Field(default_factory=list)
    background: float = Field(default=0.1, ge=0, le=1)
    edge_softness: float = Field(default=0.75, gt=0)
    noise_sigma: float = Field(default=0.0, ge=0)
    rng_seed: int = 0
