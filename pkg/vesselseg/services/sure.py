from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import norm

from ..models.enums import SureMode
from ..models.frames import FrameCoefficients
from ..models.image import Image
from .image_core import vec
from .tight_frame import detail_values

logger = logging.getLogger(__name__)

# Median of |N(0, 1)|; converts a median absolute deviation into a standard deviation.
MAD_SCALE = float(norm.ppf(0.75))


class SureParameterError(ValueError):
    """Raised when the threshold search receives no values."""


class SureDataError(ValueError):
    """Raised when the threshold search receives NaN or infinite values."""


@dataclass(frozen=True)
class RiskCurve:
    """Bookkeeping of one threshold search; ``i_best`` is 1-based like ``j``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    s: np.ndarray
    risk: np.ndarray
    i_best: int
    lambda_thresh: float

    @property
    def size(self) -> int:
        return int(self.a.size)

    @property
    def min_risk(self) -> float:
        return float(self.risk[self.i_best - 1])


def sure_threshold(values: np.ndarray) -> tuple[float, RiskCurve]:
    """Hard threshold minimizing Stein's unbiased risk over the observed magnitudes.

    With ``a`` the ascending squared values and ``j = 1..N``:
    ``risk[j] = (N - 2j + b[j] + (N - j) a[j]) / N``; the first minimizer wins.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    size = values.size
    if size == 0:
        raise SureParameterError("Threshold search needs at least one value")
    if not np.all(np.isfinite(values)):
        raise SureDataError("Threshold search values must be finite")

    a = np.sort(values**2)
    b = np.cumsum(a)
    j = np.arange(1, size + 1, dtype=np.float64)
    c = size - j
    s = b + c * a
    risk = (size - 2.0 * j + s) / size

    if __debug__:
        assert np.all(np.diff(a) >= 0), "squared magnitudes must be sorted"
        assert np.all(np.diff(b) >= 0), "prefix sums must be non-decreasing"
        assert np.all(np.diff(c) < 0), "complements must strictly decrease"

    index = int(np.argmin(risk))
    lambda_thresh = float(np.sqrt(a[index]))
    curve = RiskCurve(a=a, b=b, c=c, s=s, risk=risk, i_best=index + 1, lambda_thresh=lambda_thresh)
    return lambda_thresh, curve


def threshold_source(coeffs: FrameCoefficients, img: Image, mode: SureMode | str) -> np.ndarray:
    if SureMode(mode) is SureMode.IMAGE:
        return vec(img)
    return detail_values(coeffs)


def estimate_noise_sigma(coeffs: FrameCoefficients) -> float:
    """Robust noise level from the finest detail scale; 1.0 when those bands are all zero."""
    finest = coeffs.finest_scale
    magnitudes = np.concatenate([np.abs(band.values).ravel() for band in coeffs.details if band.scale == finest])
    sigma = float(np.median(magnitudes)) / MAD_SCALE
    if sigma <= 0.0:
        logger.debug("Finest detail scale is silent; skipping noise normalization")
        return 1.0
    return sigma


def select_threshold(
    coeffs: FrameCoefficients,
    img: Image,
    mode: SureMode | str,
    normalize: bool = False,
) -> tuple[float, RiskCurve]:
    """Threshold for one denoising step; with ``normalize`` the search runs in noise units."""
    values = threshold_source(coeffs, img, mode)
    if values.size == 0:
        raise SureParameterError("Transform produced no detail coefficients")
    scale = estimate_noise_sigma(coeffs) if normalize else 1.0
    lambda_unit, curve = sure_threshold(values / scale)
    return lambda_unit * scale, curve


def dump_risk_curve(curve: RiskCurve, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([np.arange(1, curve.size + 1), curve.a, curve.risk])
    np.savetxt(path, rows, delimiter=",", header="j,a,risk", comments="", fmt=["%d", "%.17g", "%.17g"])
