from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..models.fields import EigenField, HessianField, Kernel, VectorField
from ..models.image import Image
from .image_core import DimensionError

TRUNCATE_SIGMAS = 4.0
EIGEN_TIE_TOLERANCE = 1e-12


class KernelParameterError(ValueError):
    """Raised for an invalid derivative order or scale."""


def _as_array(img: Image | np.ndarray) -> np.ndarray:
    if isinstance(img, Image):
        return img.data
    return np.asarray(img, dtype=np.float64)


def _taps(order: int, sigma: float, radius: int) -> np.ndarray:
    """1D correlation taps for a Gaussian derivative of the given order.

    Taps are mirrored analytic derivatives, moment-normalized so that correlating them with
    ``x**order / order!`` returns exactly 1.
    """
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    gauss = np.exp(-(offsets**2) / (2.0 * sigma**2))
    smooth = gauss / gauss.sum()
    if order == 0:
        return smooth
    if order == 1:
        taps = offsets * gauss
        return taps / np.sum(offsets * taps)
    taps = (offsets**2 - sigma**2) * gauss
    taps = taps - taps.sum() * smooth
    return 2.0 * taps / np.sum(offsets**2 * taps)


def gaussian_derivative_kernel(dx: int, dy: int, sigma: float, max_radius: int | None = None) -> Kernel:
    """Sampled Gaussian derivative truncated at ceil(4 sigma), or at ``max_radius`` when smaller."""
    if sigma <= 0 or not math.isfinite(sigma):
        raise KernelParameterError(f"sigma must be positive, received {sigma}")
    if dx not in (0, 1, 2) or dy not in (0, 1, 2) or dx + dy > 2:
        raise KernelParameterError(f"Unsupported derivative order ({dx}, {dy})")

    radius = int(math.ceil(TRUNCATE_SIGMAS * sigma))
    if max_radius is not None:
        if max_radius < 1:
            raise KernelParameterError(f"max_radius must be at least 1, received {max_radius}")
        radius = min(radius, max_radius)
    weights = np.outer(_taps(dy, sigma, radius), _taps(dx, sigma, radius))
    weights.setflags(write=False)
    return Kernel(radius=radius, weights=weights, order=(dx, dy), sigma=float(sigma))


def convolve(img: Image | np.ndarray, kernel: Kernel) -> np.ndarray:
    """Dense correlation with half-sample symmetric (mirror) boundary extension."""
    data = _as_array(img)
    if kernel.radius >= min(data.shape):
        raise DimensionError(f"Kernel radius {kernel.radius} does not fit image of shape {data.shape}")
    return ndimage.correlate(data, kernel.weights, mode="reflect")


def _filter(img: Image | np.ndarray, dx: int, dy: int, sigma: float) -> np.ndarray:
    """Derivative response with the kernel radius capped below the shorter image side."""
    data = _as_array(img)
    return convolve(data, gaussian_derivative_kernel(dx, dy, sigma, max_radius=min(data.shape) - 1))


def smooth(img: Image | np.ndarray, sigma: float) -> np.ndarray:
    return _filter(img, 0, 0, sigma)


def gradient_field(img: Image | np.ndarray, sigma: float) -> VectorField:
    return VectorField(gx=_filter(img, 1, 0, sigma), gy=_filter(img, 0, 1, sigma))


def hessian_field(img: Image | np.ndarray, sigma: float) -> HessianField:
    return HessianField(
        fxx=_filter(img, 2, 0, sigma),
        fxy=_filter(img, 1, 1, sigma),
        fyy=_filter(img, 0, 2, sigma),
    )


def eigen_decompose(hessian: HessianField) -> EigenField:
    """Closed-form eigenpair of largest |lambda| for every symmetric 2x2 Hessian.

    Equal magnitudes resolve to the larger signed eigenvalue. The eigenvector's first
    nonzero component is made nonnegative.
    """
    a = np.asarray(hessian.fxx, dtype=np.float64)
    b = np.asarray(hessian.fxy, dtype=np.float64)
    c = np.asarray(hessian.fyy, dtype=np.float64)

    half_trace = 0.5 * (a + c)
    radius = np.hypot(0.5 * (a - c), b)
    upper = half_trace + radius
    lower = half_trace - radius
    lam = np.where(np.abs(lower) - np.abs(upper) > EIGEN_TIE_TOLERANCE, lower, upper)

    # Two candidate eigenvectors; the longer one is the better conditioned.
    first_x, first_y = b, lam - a
    second_x, second_y = lam - c, b
    use_first = np.hypot(first_x, first_y) >= np.hypot(second_x, second_y)
    vx = np.where(use_first, first_x, second_x)
    vy = np.where(use_first, first_y, second_y)
    norm = np.hypot(vx, vy)

    degenerate = norm == 0.0
    safe_norm = np.where(degenerate, 1.0, norm)
    vx = np.where(degenerate, 1.0, vx / safe_norm)
    vy = np.where(degenerate, 0.0, vy / safe_norm)

    flip = (vx < 0) | ((vx == 0) & (vy < 0))
    vx = np.where(flip, -vx, vx)
    vy = np.where(flip, -vy, vy)
    return EigenField(lam=lam, vx=vx, vy=vy)


def hessian_eigen(img: Image | np.ndarray, sigma: float) -> EigenField:
    return eigen_decompose(hessian_field(img, sigma))


def orientation_coherence(eigen: EigenField, p: tuple[int, int], q: tuple[int, int]) -> float:
    """|v(p) . v(q)|, insensitive to eigenvector sign."""
    px, py = eigen.vector_at(p)
    qx, qy = eigen.vector_at(q)
    return float(min(1.0, abs(px * qx + py * qy)))


def coherence_map(eigen: EigenField, p: tuple[int, int]) -> np.ndarray:
    px, py = eigen.vector_at(p)
    return np.minimum(1.0, np.abs(px * eigen.vx + py * eigen.vy))


def orientation_angle(eigen: EigenField) -> np.ndarray:
    """Eigenvector direction folded into [0, pi)."""
    return np.mod(np.arctan2(eigen.vy, eigen.vx), np.pi)
