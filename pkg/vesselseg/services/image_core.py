from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from ..models.enums import Channel
from ..models.image import BinaryMask, Image, PixelSet

logger = logging.getLogger(__name__)

_CHANNEL_INDEX = {Channel.RED: 0, Channel.GREEN: 1, Channel.BLUE: 2}
_GRAY_MODES = {"L", "LA", "1"}
_COLOR_MODES = {"RGB", "RGBA", "P"}


class ImageIOError(OSError):
    """Raised when an image or mask file cannot be read or written."""


class ImageFormatError(ValueError):
    """Raised when an image decodes but is not 8-bit grayscale or RGB."""


class DimensionError(ValueError):
    """Raised when operands disagree on grid size."""


def _open(path: Path) -> PILImage.Image:
    try:
        with PILImage.open(path) as handle:
            handle.load()
            return handle.copy()
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageIOError(f"Unable to read image {path}: {exc}") from exc


def load_image(path: Path | str, channel: Channel | str = Channel.GREEN) -> Image:
    """Load an 8-bit PNG/PGM/JPEG and return the requested channel scaled into [0, 1]."""
    path = Path(path)
    channel = Channel(channel)
    decoded = _open(path)

    if decoded.mode in _GRAY_MODES:
        if channel is not Channel.GRAY:
            logger.warning("Grayscale input %s has no %s channel; using gray", path, channel.value)
        pixels = np.asarray(decoded.convert("L"), dtype=np.float64)
    elif decoded.mode in _COLOR_MODES:
        if channel is Channel.GRAY:
            raise ImageFormatError(f"Color input {path} needs --channel red, green or blue; channels are not averaged")
        pixels = np.asarray(decoded.convert("RGB"), dtype=np.float64)[:, :, _CHANNEL_INDEX[channel]]
    else:
        raise ImageFormatError(f"Unsupported image mode {decoded.mode!r} in {path}; expected 8-bit gray or RGB")

    return Image(pixels / 255.0)


def _to_grid(source: Image | PixelSet | np.ndarray) -> np.ndarray:
    if isinstance(source, Image):
        return source.data
    if isinstance(source, PixelSet):
        return source.members
    return np.asarray(source)


def vec(img: Image | np.ndarray) -> np.ndarray:
    """Column-major flattening: columns are stacked top to bottom."""
    return _to_grid(img).flatten(order="F")


def unvec(vector: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    vector = np.asarray(vector)
    if vector.size != shape[0] * shape[1]:
        raise DimensionError(f"Vector of length {vector.size} does not fit grid {shape}")
    return vector.reshape(shape, order="F")


def blend_on_set(base: np.ndarray, replacement: np.ndarray, pixel_set: PixelSet) -> np.ndarray:
    """Take ``replacement`` on the set and ``base`` elsewhere (all operands vec-ordered)."""
    base = np.asarray(base)
    replacement = np.asarray(replacement)
    selector = vec(pixel_set)
    if not (base.shape == replacement.shape == selector.shape):
        raise DimensionError(
            f"blend_on_set operands disagree: base {base.shape}, replacement {replacement.shape}, set {selector.shape}"
        )
    return np.where(selector, replacement, base)


def _write_png(array: np.ndarray, path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        PILImage.fromarray(array.astype(np.uint8)).save(path, format="PNG")
    except OSError as exc:
        raise ImageIOError(f"Unable to write {path}: {exc}") from exc


def save_mask(mask: BinaryMask, path: Path | str) -> None:
    _write_png(mask.values * 255, Path(path))


def load_mask(path: Path | str) -> BinaryMask:
    """Read a mask PNG; any nonzero pixel counts as vessel."""
    decoded = _open(Path(path))
    return BinaryMask.from_bool(np.asarray(decoded.convert("L")) > 0)


def save_image(img: Image, path: Path | str) -> None:
    _write_png(np.rint(img.data * 255.0), Path(path))


def write_heatmap(field: np.ndarray, path: Path | str) -> None:
    """Min-max scale a real field to 8-bit gray for inspection."""
    field = np.asarray(field, dtype=np.float64)
    low, high = float(field.min()), float(field.max())
    scaled = np.zeros_like(field) if high <= low else (field - low) / (high - low)
    _write_png(np.rint(scaled * 255.0), Path(path))


def save_class_map(img: Image, path: Path | str) -> None:
    """Three-level PNG: background 0, undecided 128, vessel 255."""
    levels = np.where(img.data <= 0.0, 0, np.where(img.data >= 1.0, 255, 128))
    _write_png(levels, Path(path))
