"""
Detection: score fields over a scale pyramid, trigonometric interpolation of
the scores and Newton refinement of the peak.

Grid coordinates are ``(u, v)`` = (row, column) in feature cells.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Optional, Tuple

import numpy as np

from .errors import InvalidInputError
from .features.geometry import SampleGeometry
from .features.sampling import FeatureKind, FeatureMap, extract_sample
from .spectral import GridDomain, Spectrum, fft2, idft2

if TYPE_CHECKING:
    from .config import TrackerConfig

LOG = logging.getLogger(__name__)

DEFAULT_NEWTON_ITERS = 5
STEP_TOLERANCE = 1e-4
BACKTRACK_LIMIT = 30


@dataclass(frozen=True, eq=False)
class ScoreField:
    spectrum: np.ndarray
    grid: np.ndarray
    scale_index: int = 0

    @property
    def domain(self) -> GridDomain:
        return GridDomain.of(self.grid)


@dataclass(frozen=True, slots=True)
class SubgridPeak:
    u: float
    v: float
    score: float
    iterations: int


@dataclass(frozen=True, slots=True)
class Detection:
    """
    Winning scale's peak. ``displacement`` is ``(du, dv)`` in cells from the
    sample center; ``pixels_per_cell`` converts it to image pixels.
    """

    displacement: Tuple[float, float]
    scale_index: int
    scale_factor: float
    score: float
    newton_iters: int
    pixels_per_cell: float

    @property
    def pixel_offset(self) -> Tuple[float, float]:
        """Image-space shift ``(dx, dy)``."""

        du, dv = self.displacement
        return (dv * self.pixels_per_cell, du * self.pixels_per_cell)


def unwrap(index: float | np.ndarray, size: int) -> float | np.ndarray:
    """Signed circular offset in ``[-size//2, size - size//2)``."""

    half = size // 2
    return ((index + half) % size) - half


def signed_frequencies(size: int) -> np.ndarray:
    return unwrap(np.arange(size), size)


def score_field(
    sample: FeatureMap | np.ndarray,
    f_spectra: Spectrum | np.ndarray,
    scale_index: int = 0,
) -> ScoreField:
    """``s_hat = sum_l z_hat^l f_hat^l`` and its inverse DFT."""

    channels = sample.channels if isinstance(sample, FeatureMap) else np.asarray(sample, dtype=np.float64)
    if channels.ndim == 2:
        channels = channels[None]
    filters = f_spectra.values if isinstance(f_spectra, Spectrum) else np.asarray(f_spectra)
    if filters.ndim == 2:
        filters = filters[None]
    if channels.shape != filters.shape:
        raise InvalidInputError(f"sample {channels.shape} and filter {filters.shape} do not match")
    spectrum = np.sum(fft2(channels) * filters, axis=0)
    return ScoreField(spectrum=spectrum, grid=idft2(spectrum), scale_index=int(scale_index))


def interpolate_score(field: ScoreField, u: float, v: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Trigonometric interpolation of the scores at continuous ``(u, v)``.

    Returns the value, the gradient ``(d/du, d/dv)`` and the 2x2 Hessian. Signed
    frequencies are used and the real part taken, so for even sizes the Nyquist
    terms contribute ``cos``.
    """

    M, N = field.spectrum.shape
    km = signed_frequencies(M)
    kn = signed_frequencies(N)
    du = 2j * np.pi * km / M
    dv = 2j * np.pi * kn / N
    eu = np.exp(du * u)
    ev = np.exp(dv * v)
    S = field.spectrum
    scale = 1.0 / (M * N)

    rows = [eu, du * eu, du * du * eu]
    cols = [ev, dv * ev, dv * dv * ev]
    left = [row @ S for row in rows]

    def term(i: int, j: int) -> float:
        return float(np.real(left[i] @ cols[j])) * scale

    value = term(0, 0)
    gradient = np.array([term(1, 0), term(0, 1)])
    cross = term(1, 1)
    hessian = np.array([[term(2, 0), cross], [cross, term(0, 2)]])
    return value, gradient, hessian


def _ascent_step(field: ScoreField, u: float, v: float, value: float, gradient: np.ndarray) -> Optional[Tuple[float, float, float]]:
    norm = float(np.linalg.norm(gradient))
    if norm == 0.0:
        return None
    step = gradient / norm * 0.5
    for _ in range(BACKTRACK_LIMIT):
        candidate, _, _ = interpolate_score(field, u + step[0], v + step[1])
        if candidate > value:
            return u + step[0], v + step[1], candidate
        step = step * 0.5
    return None


def subgrid_maximize(field: ScoreField, max_iters: int = DEFAULT_NEWTON_ITERS) -> SubgridPeak:
    """
    Newton ascent from the grid argmax (row-major first on ties).

    A step falls back to backtracked gradient ascent when the Hessian is not
    negative definite, the Newton step is longer than ``M/4`` cells or it does
    not increase the score. The result is never below the grid maximum.
    """

    grid = field.grid
    if grid.size == 0:
        raise InvalidInputError("score field is empty")
    M, N = grid.shape
    start_m, start_n = np.unravel_index(int(np.argmax(grid)), grid.shape)
    grid_best = float(grid[start_m, start_n])
    u, v = float(start_m), float(start_n)
    value = grid_best
    iterations = 0

    for _ in range(int(max_iters)):
        current, gradient, hessian = interpolate_score(field, u, v)
        value = current
        moved = None
        eigenvalues = np.linalg.eigvalsh(hessian)
        if np.all(eigenvalues < 0):
            step = -np.linalg.solve(hessian, gradient)
            if float(np.linalg.norm(step)) <= M / 4.0:
                candidate, _, _ = interpolate_score(field, u + step[0], v + step[1])
                if candidate >= current:
                    moved = (u + step[0], v + step[1], candidate)
        if moved is None:
            moved = _ascent_step(field, u, v, current, gradient)
            if moved is not None:
                LOG.debug("Newton fallback to gradient ascent at (%.3f, %.3f).", u, v)
        if moved is None:
            break
        iterations += 1
        step_norm = math.hypot(moved[0] - u, moved[1] - v)
        u, v, value = moved
        if step_norm < STEP_TOLERANCE:
            break

    if value < grid_best:
        return SubgridPeak(u=float(start_m), v=float(start_n), score=grid_best, iterations=iterations)
    return SubgridPeak(u=u, v=v, score=value, iterations=iterations)


def grid_maximize(field: ScoreField) -> SubgridPeak:
    m, n = np.unravel_index(int(np.argmax(field.grid)), field.grid.shape)
    return SubgridPeak(u=float(m), v=float(n), score=float(field.grid[m, n]), iterations=0)


def scale_exponents(num_scales: int) -> List[int]:
    """``r`` in ``floor((1 - S)/2) .. floor((S - 1)/2)``."""

    if num_scales < 1:
        raise InvalidInputError(f"need at least one scale, got {num_scales}")
    low = (1 - num_scales) // 2
    high = (num_scales - 1) // 2
    return list(range(low, high + 1))


def multi_scale_detect(
    frame: np.ndarray,
    center: Tuple[float, float],
    geom: SampleGeometry,
    f_spectra: Spectrum | np.ndarray,
    config: "TrackerConfig",
    exponents: Optional[Iterable[int]] = None,
) -> Detection:
    """
    Evaluate the filter on every pyramid level and keep the level with the
    highest refined score (lowest ``r`` wins ties).
    """

    kind = FeatureKind(config.feature_kind)
    levels = sorted(scale_exponents(config.num_scales) if exponents is None else exponents)
    cm, cn = geom.domain.center
    M, N = geom.domain.shape

    if not levels:
        raise InvalidInputError("no scale levels to evaluate")

    results: List[Tuple[SubgridPeak, int]] = []
    for r in levels:
        factor = config.scale_step**r
        sample = extract_sample(frame, center, geom, factor, kind, mean_removal=config.mean_removal)
        field = score_field(sample, f_spectra, scale_index=r)
        peak = subgrid_maximize(field, config.n_newton) if config.subgrid else grid_maximize(field)
        LOG.debug("Scale r=%d: peak %.4f at (%.2f, %.2f).", r, peak.score, peak.u, peak.v)
        results.append((peak, r))

    # max keeps the first of equal scores, i.e. the lowest r
    peak, r = max(results, key=lambda item: item[0].score)
    factor = config.scale_step**r
    return Detection(
        displacement=(float(unwrap(peak.u - cm, M)), float(unwrap(peak.v - cn, N))),
        scale_index=r,
        scale_factor=float(factor),
        score=peak.score,
        newton_iters=peak.iterations,
        pixels_per_cell=geom.pixels_per_cell(factor),
    )


__all__ = [
    "Detection",
    "ScoreField",
    "SubgridPeak",
    "grid_maximize",
    "interpolate_score",
    "multi_scale_detect",
    "scale_exponents",
    "score_field",
    "signed_frequencies",
    "subgrid_maximize",
    "unwrap",
]
