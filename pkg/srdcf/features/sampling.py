"""
Windowed multi-channel samples cut from frames.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import ndimage

from ..errors import InvalidInputError
from ..spectral import GridDomain
from .geometry import SampleGeometry
from .hog import fhog
from .windows import hann_window

LOG = logging.getLogger(__name__)

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class FeatureKind(str, Enum):
    GRAYSCALE = "grayscale"
    HOG = "hog"


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """``d`` real channels over one grid, shape ``(d, M, N)``."""

    channels: np.ndarray
    cell_size: int
    domain: GridDomain

    def __post_init__(self) -> None:
        if self.channels.ndim != 3 or self.channels.shape[0] < 1:
            raise InvalidInputError(f"feature map must be (d, M, N), got {self.channels.shape}")
        self.domain.check(self.channels, "feature map")
        if not np.all(np.isfinite(self.channels)):
            raise InvalidInputError("feature map contains non-finite values")

    @property
    def num_channels(self) -> int:
        return int(self.channels.shape[0])


def to_luminance(image: np.ndarray) -> np.ndarray:
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[2] >= 3:
        return img[:, :, :3] @ LUMA_WEIGHTS
    if img.ndim == 3 and img.shape[2] == 1:
        return img[:, :, 0]
    raise InvalidInputError(f"unsupported image shape {img.shape}")


def sample_patch(
    image: np.ndarray,
    center: Tuple[float, float],
    region: Tuple[float, float],
    out_shape: Tuple[int, int],
) -> np.ndarray:
    """
    Bilinear resample of the ``region`` (rows, cols) centred at ``center`` (x, y)
    onto ``out_shape`` pixels, replicating border pixels outside the frame.
    """

    img = np.asarray(image, dtype=np.float64)
    if img.size == 0 or img.ndim not in (2, 3):
        raise InvalidInputError(f"image must be a non-empty 2D or 3-channel array, got {img.shape}")
    cx, cy = float(center[0]), float(center[1])
    rows, cols = int(out_shape[0]), int(out_shape[1])
    step_r = region[0] / rows
    step_c = region[1] / cols
    # Pixel k spans [k, k+1); array index = continuous coordinate - 0.5.
    ys = cy - region[0] / 2.0 + (np.arange(rows) + 0.5) * step_r - 0.5
    xs = cx - region[1] / 2.0 + (np.arange(cols) + 0.5) * step_c - 0.5
    grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
    coords = np.stack([grid_y, grid_x])
    if img.ndim == 2:
        return ndimage.map_coordinates(img, coords, order=1, mode="nearest")
    return np.stack(
        [ndimage.map_coordinates(img[:, :, c], coords, order=1, mode="nearest") for c in range(img.shape[2])],
        axis=-1,
    )


def grayscale_features(patch: np.ndarray, cell_size: int, mean_removal: bool = True) -> np.ndarray:
    """Luminance in [0, 1], average-pooled over ``cell_size`` blocks, shape ``(1, M, N)``."""

    gray = to_luminance(patch) / 255.0
    rows, cols = gray.shape[0] // cell_size, gray.shape[1] // cell_size
    pooled = gray[: rows * cell_size, : cols * cell_size].reshape(rows, cell_size, cols, cell_size).mean(axis=(1, 3))
    if mean_removal:
        pooled = pooled - pooled.mean()
    return pooled[None, :, :]


def extract_sample(
    image: np.ndarray,
    center: Tuple[float, float],
    geom: SampleGeometry,
    scale_factor: float = 1.0,
    kind: FeatureKind | str = FeatureKind.HOG,
    *,
    mean_removal: bool = True,
) -> FeatureMap:
    """
    Cut, resample and featurize the sample region, then apply the Hann window.
    """

    if not scale_factor > 0:
        raise InvalidInputError(f"scale factor must be positive, got {scale_factor}")
    if not (geom.target_size[0] > 0 and geom.target_size[1] > 0):
        raise InvalidInputError("sample geometry has a degenerate target size")
    kind = FeatureKind(kind)
    patch = sample_patch(image, center, geom.region_size(scale_factor), geom.template_pixels)
    if kind is FeatureKind.GRAYSCALE:
        channels = grayscale_features(patch, geom.cell_size, mean_removal=mean_removal)
    else:
        channels = fhog(patch, geom.cell_size)
    domain = geom.domain
    channels = channels * hann_window(domain)[None, :, :]
    return FeatureMap(channels=channels, cell_size=geom.cell_size, domain=domain)


__all__ = [
    "FeatureKind",
    "FeatureMap",
    "extract_sample",
    "grayscale_features",
    "sample_patch",
    "to_luminance",
]
