"""
Sample-region sizing.

A sample is a square image region of ``sample_area_factor`` times the target
area, resampled onto an ``M x M`` grid of ``cell_size`` pixel cells. When the
grid would exceed ``max_grid_size`` the region is resampled at a coarser pixel
resolution (``base_scale > 1``) so it still covers the same image area.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple

from ..errors import InvalidInputError
from ..spectral import GridDomain

LOG = logging.getLogger(__name__)

Box = Tuple[float, float, float, float]


def box_center(box: Box) -> Tuple[float, float]:
    """Center ``(x, y)`` of an ``(x, y, w, h)`` box; pixel ``k`` spans ``[k, k+1)``."""

    x, y, w, h = box
    return (x + w / 2.0, y + h / 2.0)


@dataclass(frozen=True, slots=True)
class SampleGeometry:
    target_size: Tuple[float, float]
    sample_area_factor: float
    grid_size: Tuple[int, int]
    cell_size: int
    base_scale: float = 1.0
    current_scale: float = 1.0

    @classmethod
    def from_target(
        cls,
        target_size: Tuple[float, float],
        *,
        cell_size: int = 4,
        sample_area_factor: float = 16.0,
        max_grid_size: int = 50,
    ) -> "SampleGeometry":
        """
        Size the grid for a target of ``(height, width)`` pixels.
        """

        height, width = float(target_size[0]), float(target_size[1])
        if not (height > 0 and width > 0) or not (math.isfinite(height) and math.isfinite(width)):
            raise InvalidInputError(f"target size must be positive, got {target_size}")
        if cell_size < 1 or sample_area_factor <= 0 or max_grid_size < 1:
            raise InvalidInputError("cell size, sample area factor and max grid size must be positive")

        side = math.sqrt(sample_area_factor * height * width)
        cells = max(1, int(round(side / cell_size)))
        base_scale = 1.0
        if cells > max_grid_size:
            cells = int(max_grid_size)
            base_scale = side / (cells * cell_size)
            LOG.debug(
                "Grid clamped to %d cells; sampling at %.3f image pixels per template pixel.",
                cells,
                base_scale,
            )
        return cls(
            target_size=(height, width),
            sample_area_factor=float(sample_area_factor),
            grid_size=(cells, cells),
            cell_size=int(cell_size),
            base_scale=base_scale,
        )

    @property
    def domain(self) -> GridDomain:
        return GridDomain(M=self.grid_size[0], N=self.grid_size[1])

    @property
    def template_pixels(self) -> Tuple[int, int]:
        """Pixel size of the resampled patch, ``grid * cell_size``."""

        return (self.grid_size[0] * self.cell_size, self.grid_size[1] * self.cell_size)

    @property
    def target_size_cells(self) -> Tuple[float, float]:
        """Frame-1 target size measured in feature cells."""

        unit = self.cell_size * self.base_scale
        return (self.target_size[0] / unit, self.target_size[1] / unit)

    def pixels_per_cell(self, scale_factor: float = 1.0) -> float:
        return self.cell_size * self.base_scale * self.current_scale * scale_factor

    def region_size(self, scale_factor: float = 1.0) -> Tuple[float, float]:
        """Image-pixel extent ``(rows, cols)`` of the sampled region."""

        ppc = self.pixels_per_cell(scale_factor)
        return (self.grid_size[0] * ppc, self.grid_size[1] * ppc)

    def with_scale(self, current_scale: float) -> "SampleGeometry":
        if not current_scale > 0:
            raise InvalidInputError(f"scale must be positive, got {current_scale}")
        return replace(self, current_scale=float(current_scale))


__all__ = ["Box", "SampleGeometry", "box_center"]
