from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Kernel:
    """Sampled Gaussian-derivative correlation kernel.

    ``weights[r + dy_offset, r + dx_offset]`` holds the tap applied to the pixel at that
    offset; rows run along y and columns along x.
    """

    radius: int
    weights: np.ndarray
    order: tuple[int, int]
    sigma: float


@dataclass(frozen=True)
class VectorField:
    gx: np.ndarray
    gy: np.ndarray

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.gx, self.gy)

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.gx.shape)  # type: ignore[return-value]


@dataclass(frozen=True)
class HessianField:
    # fyx is fxy; only the one mixed entry is stored.
    fxx: np.ndarray
    fxy: np.ndarray
    fyy: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.fxx.shape)  # type: ignore[return-value]


@dataclass(frozen=True)
class EigenField:
    """Per-pixel eigenpair of largest absolute eigenvalue; ``(vx, vy)`` is unit length."""

    lam: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.lam.shape)  # type: ignore[return-value]

    def vector_at(self, pixel: tuple[int, int]) -> tuple[float, float]:
        row, col = pixel
        return float(self.vx[row, col]), float(self.vy[row, col])
