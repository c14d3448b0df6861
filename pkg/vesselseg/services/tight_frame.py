from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Protocol

import numpy as np

from ..models.frames import Band, FrameCoefficients, FrameFamily, TransformKind
from ..models.image import Image
from .image_core import DimensionError, write_heatmap

logger = logging.getLogger(__name__)

MIN_COARSE_SIDE = 4


class TransformParameterError(ValueError):
    """Raised when scales or orientations do not suit the image or are invalid."""


@dataclass(frozen=True)
class BandFilter:
    scale: int
    orientation: int
    is_coarse: bool
    response: np.ndarray


class FrameBuilder(Protocol):
    family: FrameFamily

    def filters(self, shape: tuple[int, int], scales: int, orientations: int) -> tuple[BandFilter, ...]:
        ...


def _frequency_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Angular frequencies in [-pi, pi) laid out in FFT order; returns (wy, wx)."""
    wy = 2.0 * np.pi * np.fft.fftfreq(shape[0])
    wx = 2.0 * np.pi * np.fft.fftfreq(shape[1])
    return np.meshgrid(wy, wx, indexing="ij")


def _meyer_step(x: np.ndarray) -> np.ndarray:
    """Smooth 0-to-1 transition on [0, 1] with step(1 - x) = 1 - step(x)."""
    x = np.clip(x, 0.0, 1.0)
    return x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)


def _mirror(response: np.ndarray) -> np.ndarray:
    """Evaluate a response at the negated frequency grid (index k -> -k mod N)."""
    return np.roll(np.flip(response, axis=(0, 1)), shift=(1, 1), axis=(0, 1))


class FrameletBuilder:
    """Undecimated piecewise-linear B-spline framelet.

    Filters h0 = [1, 2, 1]/4, h1 = sqrt(2)/4 [1, 0, -1], h2 = [-1, 2, -1]/4 satisfy
    |H0|^2 + |H1|^2 + |H2|^2 = 1; their tensor products give 9 bands per level and the
    low-low band feeds the next, dilated, level.
    """

    family = FrameFamily.FRAMELET

    @staticmethod
    def _responses(omega: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        h0 = (1.0 + np.cos(omega)) / 2.0 + 0j
        h1 = 1j * (np.sqrt(2.0) / 2.0) * np.sin(omega)
        h2 = (1.0 - np.cos(omega)) / 2.0 + 0j
        return h0, h1, h2

    def filters(self, shape: tuple[int, int], scales: int, orientations: int) -> tuple[BandFilter, ...]:
        wy, wx = _frequency_grid(shape)
        low = np.ones(shape, dtype=np.complex128)
        details: list[BandFilter] = []
        for level in range(scales - 1):
            dilation = 2.0**level
            along_y = self._responses(dilation * wy)
            along_x = self._responses(dilation * wx)
            scale_index = scales - 1 - level
            for a, b in itertools.product(range(3), repeat=2):
                if a == 0 and b == 0:
                    continue
                details.append(
                    BandFilter(
                        scale=scale_index,
                        orientation=3 * a + b - 1,
                        is_coarse=False,
                        response=low * along_y[a] * along_x[b],
                    )
                )
            low = low * along_y[0] * along_x[0]

        coarse = BandFilter(scale=0, orientation=0, is_coarse=True, response=low)
        details.sort(key=lambda band: (band.scale, band.orientation))
        return (coarse, *details)


class CurveletBuilder:
    """FFT curvelet-style frame: smooth dyadic annuli split into angular wedges.

    Squared windows sum to one at every frequency and each window is even in frequency,
    so bands are real and analysis followed by synthesis is the identity.
    """

    family = FrameFamily.CURVELET

    @staticmethod
    def _lowpass(radius: np.ndarray, cutoff: float) -> np.ndarray:
        # 1 below cutoff/2, 0 above cutoff.
        half = cutoff / 2.0
        return np.cos(0.5 * np.pi * _meyer_step((radius - half) / half))

    @staticmethod
    def _angular(theta: np.ndarray, wedges: int) -> list[np.ndarray]:
        width = np.pi / wedges
        ramp = width / 4.0
        windows = []
        for index in range(wedges):
            offset = np.mod(theta - index * width + np.pi / 2.0, np.pi) - np.pi / 2.0
            u = (np.abs(offset) - (width / 2.0 - ramp)) / (2.0 * ramp)
            windows.append(np.cos(0.5 * np.pi * _meyer_step(u)))
        return windows

    @staticmethod
    def orientations_at(scale: int, orientations: int) -> int:
        return orientations * 2 ** ((scale - 1) // 2)

    def filters(self, shape: tuple[int, int], scales: int, orientations: int) -> tuple[BandFilter, ...]:
        wy, wx = _frequency_grid(shape)
        radius = np.hypot(wx, wy)
        theta = np.mod(np.arctan2(wy, wx), np.pi)

        lowpasses = [self._lowpass(radius, np.pi / 2.0 ** (scales - 2 - j)) for j in range(scales - 1)]
        lowpasses.append(np.ones(shape))
        bands = [BandFilter(scale=0, orientation=0, is_coarse=True, response=lowpasses[0])]
        for scale in range(1, scales):
            annulus = np.sqrt(np.clip(lowpasses[scale] ** 2 - lowpasses[scale - 1] ** 2, 0.0, None))
            wedges = self.orientations_at(scale, orientations) // 2
            for orientation, angular in enumerate(self._angular(theta, wedges)):
                bands.append(BandFilter(scale=scale, orientation=orientation, is_coarse=False, response=annulus * angular))

        symmetric = []
        for band in bands:
            response = np.sqrt(0.5 * (band.response**2 + _mirror(band.response) ** 2))
            symmetric.append(replace(band, response=response.astype(np.complex128)))
        return tuple(symmetric)


FRAME_BUILDERS: dict[FrameFamily, FrameBuilder] = {
    FrameFamily.FRAMELET: FrameletBuilder(),
    FrameFamily.CURVELET: CurveletBuilder(),
}


def _validate(shape: tuple[int, int], scales: int) -> None:
    if scales < 2:
        raise TransformParameterError(f"At least 2 scales are required, received {scales}")
    needed = max(2**scales, MIN_COARSE_SIDE)
    if min(shape) < needed:
        raise TransformParameterError(f"Image of shape {shape} is too small for {scales} scales (needs {needed} per side)")


@lru_cache(maxsize=32)
def _cached_filters(family: FrameFamily, shape: tuple[int, int], scales: int, orientations: int) -> tuple[BandFilter, ...]:
    filters = FRAME_BUILDERS[family].filters(shape, scales, orientations)
    for band in filters:
        band.response.setflags(write=False)
    return filters


def band_filters(kind: TransformKind, shape: tuple[int, int]) -> tuple[BandFilter, ...]:
    scales = kind.resolved_scales(shape)
    _validate(shape, scales)
    return _cached_filters(kind.family, tuple(shape), scales, kind.orientations)


def decompose(img: Image | np.ndarray, kind: TransformKind) -> FrameCoefficients:
    data = img.data if isinstance(img, Image) else np.asarray(img, dtype=np.float64)
    shape = (int(data.shape[0]), int(data.shape[1]))
    filters = band_filters(kind, shape)
    spectrum = np.fft.fft2(data)
    bands = tuple(
        Band(
            scale=band.scale,
            orientation=band.orientation,
            is_coarse=band.is_coarse,
            values=np.fft.ifft2(spectrum * band.response).real,
        )
        for band in filters
    )
    return FrameCoefficients(
        bands=bands,
        geometry=shape,
        family=kind.family,
        scales=kind.resolved_scales(shape),
        orientations=kind.orientations,
    )


def reconstruct(coeffs: FrameCoefficients, kind: TransformKind) -> np.ndarray:
    """Adjoint of ``decompose``; the result is not clamped."""
    filters = band_filters(kind, coeffs.geometry)
    if (
        kind.family != coeffs.family
        or kind.resolved_scales(coeffs.geometry) != coeffs.scales
        or len(filters) != len(coeffs.bands)
    ):
        raise DimensionError("Coefficient layout does not match the requested transform")

    accumulator = np.zeros(coeffs.geometry, dtype=np.complex128)
    for band_filter, band in zip(filters, coeffs.bands):
        if band.values.shape != coeffs.geometry or band.scale != band_filter.scale:
            raise DimensionError(f"Band ({band.scale}, {band.orientation}) does not match geometry {coeffs.geometry}")
        accumulator += np.fft.fft2(band.values) * np.conj(band_filter.response)
    return np.fft.ifft2(accumulator).real


def hard_threshold(coeffs: FrameCoefficients, lam: float) -> FrameCoefficients:
    """Zero detail coefficients with |value| <= lam; the coarse band is left intact."""
    if lam < 0:
        raise TransformParameterError(f"Threshold must be nonnegative, received {lam}")
    bands = tuple(
        band if band.is_coarse else replace(band, values=np.where(np.abs(band.values) > lam, band.values, 0.0))
        for band in coeffs.bands
    )
    return replace(coeffs, bands=bands)


def detail_values(coeffs: FrameCoefficients) -> np.ndarray:
    details = coeffs.details
    if not details:
        return np.zeros(0)
    return np.concatenate([band.values.ravel() for band in details])


def dump_bands(coeffs: FrameCoefficients, directory: Path) -> None:
    for band in coeffs.bands:
        write_heatmap(np.abs(band.values), directory / f"band_{band.scale}_{band.orientation}.png")
    logger.debug("Wrote %d coefficient bands to %s", len(coeffs.bands), directory)
