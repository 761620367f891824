"""
31-channel Felzenszwalb HOG.

Same three stages as the ``fhog`` module used by the KCF/DSST trackers
(``getFeatureMaps`` / ``normalizeAndTruncate`` / ``PCAFeatureMaps``), written in
numpy. Differences: hard cell assignment instead of bilinear spatial voting,
and the output keeps one cell per ``cell_size`` block (block energies at the
grid border use replicate padding) so an ``H x W`` patch yields exactly
``H/cell x W/cell`` cells.

Channel layout: 18 contrast-sensitive orientations, 9 contrast-insensitive
orientations, 4 block-energy (texture) channels.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError

NUM_SECTORS = 9
NUM_CHANNELS = 31
TRUNCATION = 0.2
TEXTURE_WEIGHT = 0.2357
ENERGY_EPS = 1e-4

_ANGLES = np.arange(NUM_SECTORS) * np.pi / NUM_SECTORS
_BOUNDARY_X = np.cos(_ANGLES)
_BOUNDARY_Y = np.sin(_ANGLES)


def pixel_gradients(image: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Central-difference gradients with replicated borders.

    For colour input the channel with the largest gradient magnitude wins at
    each pixel.
    """

    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = padded[1:-1, 2:, :] - padded[1:-1, :-2, :]
    dy = padded[2:, 1:-1, :] - padded[:-2, 1:-1, :]
    if img.shape[2] == 1:
        return dx[:, :, 0], dy[:, :, 0]
    best = np.argmax(dx * dx + dy * dy, axis=2)[:, :, None]
    return (
        np.take_along_axis(dx, best, axis=2)[:, :, 0],
        np.take_along_axis(dy, best, axis=2)[:, :, 0],
    )


def orientation_bins(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """
    Contrast-sensitive bin (0..17) per pixel: best of 9 directions by absolute
    dot product, shifted by 9 when the gradient points the other way.
    """

    dots = dx[..., None] * _BOUNDARY_X + dy[..., None] * _BOUNDARY_Y
    best = np.argmax(np.abs(dots), axis=-1)
    negative = np.take_along_axis(dots, best[..., None], axis=-1)[..., 0] < 0
    return best + NUM_SECTORS * negative


def cell_histograms(image: np.ndarray, cell_size: int) -> np.ndarray:
    """Per-cell magnitude-weighted 18-bin histograms, shape ``(Hc, Wc, 18)``."""

    img = np.asarray(image)
    height, width = img.shape[:2]
    if cell_size < 1 or height < cell_size or width < cell_size:
        raise InvalidInputError(f"patch {img.shape[:2]} too small for cell size {cell_size}")
    rows, cols = height // cell_size, width // cell_size
    img = img[: rows * cell_size, : cols * cell_size]

    dx, dy = pixel_gradients(img)
    magnitude = np.sqrt(dx * dx + dy * dy)
    bins = orientation_bins(dx, dy)

    cell_r = np.arange(rows * cell_size) // cell_size
    cell_c = np.arange(cols * cell_size) // cell_size
    cell = cell_r[:, None] * cols + cell_c[None, :]
    flat = (cell * (2 * NUM_SECTORS) + bins).ravel()
    hist = np.bincount(flat, weights=magnitude.ravel(), minlength=rows * cols * 2 * NUM_SECTORS)
    return hist.reshape(rows, cols, 2 * NUM_SECTORS)


def _block_normalizers(energy: np.ndarray) -> list[np.ndarray]:
    padded = np.pad(energy, 1, mode="edge")
    blocks = padded[:-1, :-1] + padded[1:, :-1] + padded[:-1, 1:] + padded[1:, 1:]
    rows, cols = energy.shape
    return [
        1.0 / np.sqrt(blocks[di : di + rows, dj : dj + cols] + ENERGY_EPS)
        for di in (0, 1)
        for dj in (0, 1)
    ]


def fhog(image: np.ndarray, cell_size: int) -> np.ndarray:
    """
    Compute HOG features of a patch, returning ``(31, H/cell, W/cell)``.
    """

    hist = cell_histograms(image, cell_size)
    insensitive = hist[..., :NUM_SECTORS] + hist[..., NUM_SECTORS:]
    energy = np.sum(insensitive * insensitive, axis=-1)

    rows, cols = energy.shape
    out = np.zeros((NUM_CHANNELS, rows, cols), dtype=np.float64)
    for index, norm in enumerate(_block_normalizers(energy)):
        sensitive = np.minimum(hist * norm[..., None], TRUNCATION)
        contrast_free = np.minimum(insensitive * norm[..., None], TRUNCATION)
        out[: 2 * NUM_SECTORS] += 0.5 * np.moveaxis(sensitive, -1, 0)
        out[2 * NUM_SECTORS : 3 * NUM_SECTORS] += 0.5 * np.moveaxis(contrast_free, -1, 0)
        out[3 * NUM_SECTORS + index] = TEXTURE_WEIGHT * np.sum(sensitive, axis=-1)
    return out


__all__ = ["NUM_CHANNELS", "cell_histograms", "fhog", "orientation_bins", "pixel_gradients"]
