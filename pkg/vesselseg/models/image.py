from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_SIDE = 3


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Image:
    """Grid of intensities in [0, 1], indexed ``data[row, col]`` (row = y, col = x)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.data, dtype=np.float64, copy=True)
        if array.ndim != 2:
            raise ValueError(f"Image must be two-dimensional, received shape {array.shape}")
        if min(array.shape) < MIN_SIDE:
            raise ValueError(f"Image sides must be at least {MIN_SIDE} pixels, received {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("Image intensities must be finite")
        if array.min() < 0.0 or array.max() > 1.0:
            raise ValueError("Image intensities must lie in [0, 1]")
        object.__setattr__(self, "data", _frozen(array))

    @classmethod
    def clamped(cls, array: np.ndarray) -> "Image":
        return cls(np.clip(array, 0.0, 1.0))

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)


@dataclass(frozen=True)
class PixelSet:
    """Boolean membership grid; the active set of the segmentation loop."""

    members: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.members, dtype=bool, copy=True)
        if array.ndim != 2:
            raise ValueError(f"PixelSet must be two-dimensional, received shape {array.shape}")
        object.__setattr__(self, "members", _frozen(array))

    @classmethod
    def empty(cls, shape: tuple[int, int]) -> "PixelSet":
        return cls(np.zeros(shape, dtype=bool))

    @classmethod
    def full(cls, shape: tuple[int, int]) -> "PixelSet":
        return cls(np.ones(shape, dtype=bool))

    @property
    def height(self) -> int:
        return int(self.members.shape[0])

    @property
    def width(self) -> int:
        return int(self.members.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.members))

    def __len__(self) -> int:
        return self.cardinality

    @property
    def is_empty(self) -> bool:
        return not self.members.any()

    def issubset(self, other: "PixelSet") -> bool:
        return bool(np.all(~self.members | other.members))


@dataclass(frozen=True)
class BinaryMask:
    """Two-valued segmentation result; 1 marks vessel pixels."""

    values: np.ndarray

    def __post_init__(self) -> None:
        array = np.asarray(self.values)
        if array.ndim != 2:
            raise ValueError(f"BinaryMask must be two-dimensional, received shape {array.shape}")
        if not np.all((array == 0) | (array == 1)):
            raise ValueError("BinaryMask values must be exactly 0 or 1")
        object.__setattr__(self, "values", _frozen(array.astype(np.uint8)))

    @classmethod
    def from_bool(cls, array: np.ndarray) -> "BinaryMask":
        return cls(np.asarray(array, dtype=bool).astype(np.uint8))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def vessel(self) -> np.ndarray:
        return self.values.astype(bool)
