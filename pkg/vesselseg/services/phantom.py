from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Callable

import numpy as np
from pydantic import ValidationError
from scipy.special import erfc

from ..models.image import BinaryMask, Image
from ..models.phantom import PhantomSpec, TubeSpec

logger = logging.getLogger(__name__)

SUITE_FAMILIES = ("straight", "faint-branch", "dark-junction", "gapped")
SUITE_NOISE_LEVELS = (0.0, 0.05, 0.15)
SUITE_SEEDS = (0, 1, 2)


class PhantomSpecError(ValueError):
    """Raised for an unknown phantom family or an invalid phantom description."""


def _grid(spec: PhantomSpec) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.mgrid[0 : spec.height, 0 : spec.width]
    return cols.astype(np.float64), rows.astype(np.float64)


def tube_distance(tube: TubeSpec, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact distance from every pixel center to the polyline, and the arclength fraction
    (0 at the first point, 1 at the last) of the nearest centerline point."""
    points = np.asarray(tube.points, dtype=np.float64)
    starts, ends = points[:-1], points[1:]
    lengths = np.hypot(*(ends - starts).T)
    total = float(lengths.sum())
    offsets = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])

    best = np.full(x.shape, np.inf)
    along = np.zeros(x.shape)
    for (x0, y0), (x1, y1), length, offset in zip(starts, ends, lengths, offsets):
        dx, dy = x1 - x0, y1 - y0
        squared = dx * dx + dy * dy
        if squared > 0:
            t = np.clip(((x - x0) * dx + (y - y0) * dy) / squared, 0.0, 1.0)
        else:
            t = np.zeros(x.shape)
        distance = np.hypot(x - (x0 + t * dx), y - (y0 + t * dy))
        closer = distance < best
        best = np.where(closer, distance, best)
        fraction = (offset + t * length) / total if total > 0 else np.zeros(x.shape)
        along = np.where(closer, fraction, along)
    return best, along


def render(spec: PhantomSpec) -> tuple[Image, BinaryMask]:
    """Draw the tubes over a flat background, add seeded noise, clamp to [0, 1].

    Cross-sections are a Gaussian-blurred tube indicator, not a Gaussian bump: contrast
    falls off as ``0.5 * erfc((d - radius) / (sqrt(2) * edge_softness))`` in the distance
    ``d`` to the centerline, so the profile is flat-topped for wide tubes and half of the
    peak contrast sits exactly at the radius. The truth mask marks pixels within the
    radius of any centerline.
    """
    x, y = _grid(spec)
    contrast = np.zeros(x.shape)
    truth = np.zeros(x.shape, dtype=bool)
    for tube in spec.tubes:
        distance, along = tube_distance(tube, x, y)
        end_peak = tube.peak if tube.end_peak is None else tube.end_peak
        peak = tube.peak + (end_peak - tube.peak) * along
        profile = 0.5 * erfc((distance - tube.radius) / (np.sqrt(2.0) * spec.edge_softness))
        contrast = np.maximum(contrast, (peak - spec.background) * profile)
        truth |= distance <= tube.radius

    data = spec.background + contrast
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.rng_seed)
        data = data + rng.normal(0.0, spec.noise_sigma, size=data.shape)
    return Image.clamped(data), BinaryMask.from_bool(truth)


def faint_branch_mask(spec: PhantomSpec) -> BinaryMask:
    x, y = _grid(spec)
    mask = np.zeros(x.shape, dtype=bool)
    for tube in spec.tubes:
        if tube.faint_branch:
            mask |= tube_distance(tube, x, y)[0] <= tube.radius
    return BinaryMask.from_bool(mask)


def _scaled(width: int, height: int, *fractions: tuple[float, float]) -> list[tuple[float, float]]:
    return [(fx * (width - 1), fy * (height - 1)) for fx, fy in fractions]


def _straight(width: int, height: int) -> list[TubeSpec]:
    return [TubeSpec(points=_scaled(width, height, (0.08, 0.3), (0.92, 0.7)), radius=3.0, peak=0.85)]


def _faint_branch(width: int, height: int) -> list[TubeSpec]:
    return [
        TubeSpec(points=_scaled(width, height, (0.05, 0.5), (0.5, 0.5), (0.95, 0.45)), radius=3.0, peak=0.85),
        TubeSpec(
            points=_scaled(width, height, (0.4, 0.5), (0.6, 0.3), (0.8, 0.12)),
            radius=1.5,
            peak=0.6,
            end_peak=0.3,
            faint_branch=True,
        ),
        TubeSpec(
            points=_scaled(width, height, (0.55, 0.5), (0.7, 0.72), (0.85, 0.9)),
            radius=1.5,
            peak=0.6,
            end_peak=0.3,
            faint_branch=True,
        ),
    ]


def _dark_junction(width: int, height: int) -> list[TubeSpec]:
    return [
        TubeSpec(points=_scaled(width, height, (0.05, 0.5), (0.42, 0.5)), radius=3.0, peak=0.85),
        TubeSpec(points=_scaled(width, height, (0.42, 0.5), (0.58, 0.5)), radius=3.0, peak=0.45),
        TubeSpec(points=_scaled(width, height, (0.58, 0.5), (0.95, 0.5)), radius=3.0, peak=0.85),
        TubeSpec(points=_scaled(width, height, (0.5, 0.56), (0.5, 0.95)), radius=2.5, peak=0.8),
    ]


def _gapped(width: int, height: int) -> list[TubeSpec]:
    return [
        TubeSpec(points=_scaled(width, height, (0.1, 0.2), (0.45, 0.55)), radius=2.0, peak=0.8),
        TubeSpec(points=_scaled(width, height, (0.45, 0.55), (0.55, 0.65)), radius=2.0, peak=0.35),
        TubeSpec(points=_scaled(width, height, (0.55, 0.65), (0.9, 0.85)), radius=2.0, peak=0.8),
    ]


def _empty(width: int, height: int) -> list[TubeSpec]:
    return []


PHANTOM_FAMILIES: dict[str, Callable[[int, int], list[TubeSpec]]] = {
    "straight": _straight,
    "faint-branch": _faint_branch,
    "dark-junction": _dark_junction,
    "gapped": _gapped,
    "empty": _empty,
}


def phantom_spec(
    family: str,
    width: int = 128,
    height: int = 128,
    noise_sigma: float = 0.05,
    rng_seed: int = 0,
) -> PhantomSpec:
    builder = PHANTOM_FAMILIES.get(family)
    if builder is None:
        raise PhantomSpecError(f"Unknown phantom family {family!r}; choose from {sorted(PHANTOM_FAMILIES)}")
    try:
        return PhantomSpec(
            width=width,
            height=height,
            tubes=builder(width, height),
            noise_sigma=noise_sigma,
            rng_seed=rng_seed,
        )
    except ValidationError as exc:
        raise PhantomSpecError(str(exc)) from exc


def load_phantom_spec(path: Path, rng_seed: int | None = None) -> PhantomSpec:
    """Read a JSON phantom description; ``rng_seed`` overrides the file's seed when given."""
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        spec = PhantomSpec.model_validate(payload)
    except json.JSONDecodeError as exc:
        raise PhantomSpecError(f"Phantom spec {path} is not valid JSON: {exc}") from exc
    except ValidationError as exc:
        raise PhantomSpecError(f"Phantom spec {path} is invalid: {exc}") from exc
    if rng_seed is not None:
        spec = spec.model_copy(update={"rng_seed": rng_seed})
    return spec


def phantom_suite(width: int = 128, height: int = 128) -> list[PhantomSpec]:
    """Every tube family at every noise level; pair with ``SUITE_SEEDS`` for replicates."""
    return [
        phantom_spec(family, width, height, noise_sigma=noise)
        for family in SUITE_FAMILIES
        for noise in SUITE_NOISE_LEVELS
    ]


def with_seed(spec: PhantomSpec, rng_seed: int) -> PhantomSpec:
    return spec.model_copy(update={"rng_seed": rng_seed})
