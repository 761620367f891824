"""
Cosine window and Gaussian label on the feature grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import windows

from ..errors import InvalidInputError
from ..spectral import GridDomain

DEFAULT_LABEL_SIGMA_FACTOR = 1.0 / 16.0


@dataclass(frozen=True, eq=False)
class LabelMap:
    values: np.ndarray
    sigma: float


def hann_window(domain: GridDomain) -> np.ndarray:
    """
    Separable Hann window; ``hann(k; K) = 0.5 (1 - cos(2 pi k / (K - 1)))``, 1 for ``K == 1``.
    """

    rows = windows.hann(domain.M, sym=True)
    cols = windows.hann(domain.N, sym=True)
    return np.outer(rows, cols)


def centered_offsets(size: int, center: int) -> np.ndarray:
    """Signed circular offsets ``k - center`` wrapped into ``[-size/2, size/2)``."""

    half = size // 2
    return ((np.arange(size) - center + half) % size) - half


def gaussian_label(
    domain: GridDomain,
    target_size_cells: Tuple[float, float],
    sigma_factor: float = DEFAULT_LABEL_SIGMA_FACTOR,
) -> LabelMap:
    """
    Gaussian peaked at the sample-center cell with ``sigma = sigma_factor * sqrt(p q)`` cells.
    """

    p, q = float(target_size_cells[0]), float(target_size_cells[1])
    if p < 1 or q < 1:
        raise InvalidInputError(f"target size in cells must be >= 1, got {target_size_cells}")
    if not sigma_factor > 0:
        raise InvalidInputError(f"label sigma factor must be positive, got {sigma_factor}")
    sigma = sigma_factor * np.sqrt(p * q)
    cm, cn = domain.center
    dm = centered_offsets(domain.M, cm)
    dn = centered_offsets(domain.N, cn)
    values = np.exp(-(dm[:, None] ** 2 + dn[None, :] ** 2) / (2.0 * sigma**2))
    return LabelMap(values=values, sigma=float(sigma))


__all__ = ["DEFAULT_LABEL_SIGMA_FACTOR", "LabelMap", "centered_offsets", "gaussian_label", "hann_window"]
