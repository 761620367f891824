"""
Per-frame tracking loop: detect with the previous filter, move the target,
train on a sample at the new location and refresh the filter.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .config import RegMode, TrackerConfig
from .detection import Detection, multi_scale_detect
from .errors import InvalidInputError
from .features import Box, FeatureKind, LabelMap, SampleGeometry, box_center, extract_sample, gaussian_label
from .regularization import (
    RegularizationOperator,
    SpatialWeights,
    build_operator,
    build_spatial_weights,
    uniform_weights,
)
from .solver import ModelState, NormalEquationPattern, gauss_seidel, init_model, initial_solve, update_model
from .spectral import RealSpectrumBasis, partition_domain

LOG = logging.getLogger(__name__)

MIN_TARGET_CELLS = 5.0


@dataclass(frozen=True, slots=True)
class TargetState:
    center: Tuple[float, float]
    size: Tuple[float, float]
    scale: float

    @property
    def bbox(self) -> Box:
        """``(x, y, w, h)`` with 0-indexed top-left corner."""

        (cx, cy), (w, h) = self.center, self.size
        return (cx - w / 2.0, cy - h / 2.0, w, h)


def validate_box(box: Box, frame_shape: Tuple[int, ...]) -> Box:
    if len(box) != 4:
        raise InvalidInputError(f"bounding box must have 4 values, got {box!r}")
    x, y, w, h = (float(value) for value in box)
    if not all(math.isfinite(value) for value in (x, y, w, h)):
        raise InvalidInputError(f"bounding box has non-finite values: {box!r}")
    if w <= 0 or h <= 0:
        raise InvalidInputError(f"bounding box must have positive area, got {box!r}")
    height, width = frame_shape[:2]
    cx, cy = x + w / 2.0, y + h / 2.0
    if not (0.0 <= cx <= width and 0.0 <= cy <= height):
        raise InvalidInputError(f"bounding box center ({cx:.1f}, {cy:.1f}) lies outside the {width}x{height} frame")
    return (x, y, w, h)


def scale_bounds(config: TrackerConfig, geom: SampleGeometry, frame_shape: Tuple[int, ...]) -> Tuple[float, float]:
    """
    Powers of ``a`` keeping the target above ``MIN_TARGET_CELLS`` cells and
    inside the frame. Both bounds include the initial scale.
    """

    a = config.scale_step
    smallest_cells = min(geom.target_size_cells)
    height, width = frame_shape[:2]
    room = min(height / geom.target_size[0], width / geom.target_size[1])
    low = a ** math.ceil(math.log(MIN_TARGET_CELLS / smallest_cells) / math.log(a))
    high = a ** math.floor(math.log(room) / math.log(a))
    return (min(1.0, low), max(1.0, high))


def _as_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.size == 0 or frame.ndim not in (2, 3):
        raise InvalidInputError(f"frame must be a non-empty 2D or 3-channel image, got shape {frame.shape}")
    return frame


class Tracker:
    """
    Single-target tracker. Not safe to share across threads mid-step; separate
    instances are independent.
    """

    def __init__(
        self,
        config: TrackerConfig,
        geometry: SampleGeometry,
        basis: RealSpectrumBasis,
        weights: SpatialWeights,
        reg_op: RegularizationOperator,
        label: LabelMap,
        model: ModelState,
        state: TargetState,
        frame_shape: Tuple[int, ...],
    ) -> None:
        self.config = config
        self.geometry = geometry
        self.basis = basis
        self.weights = weights
        self.reg_op = reg_op
        self.label = label
        self._model = model
        self._state = state
        self.frame_shape = tuple(frame_shape)
        self.min_scale, self.max_scale = scale_bounds(config, geometry, frame_shape)
        self.frame_times: List[float] = []
        self.last_detection: Optional[Detection] = None

    @property
    def model(self) -> ModelState:
        return self._model

    @property
    def state(self) -> TargetState:
        return self._state

    @property
    def fps(self) -> float:
        total = sum(self.frame_times)
        return len(self.frame_times) / total if total > 0 else 0.0

    @classmethod
    def init(cls, frame: np.ndarray, bbox: Box, config: Optional[TrackerConfig] = None) -> "Tracker":
        """
        Build geometry, penalty and model from the first frame and train on it.
        """

        started = time.perf_counter()
        config = config or TrackerConfig()
        frame = _as_frame(frame)
        x, y, w, h = validate_box(bbox, frame.shape)
        center = box_center((x, y, w, h))

        geometry = SampleGeometry.from_target(
            (h, w),
            cell_size=config.cell_size,
            sample_area_factor=config.sample_area_factor,
            max_grid_size=config.max_grid_size,
        )
        p, q = geometry.target_size_cells
        if p < 1 or q < 1:
            raise InvalidInputError(f"target {w:g}x{h:g} px covers less than one {config.cell_size}px cell")
        domain = geometry.domain
        basis = partition_domain(domain)

        if RegMode(config.reg_mode) is RegMode.UNIFORM:
            weights = uniform_weights(domain, config.uniform_lambda)
        else:
            weights = build_spatial_weights(
                domain,
                geometry.target_size_cells,
                mu=config.mu,
                eta=config.eta,
                target_nnz=config.target_nnz,
            )
        reg_op = build_operator(weights.sparse_spectrum, basis, jitter=config.reg_jitter)
        label = gaussian_label(domain, geometry.target_size_cells, sigma_factor=config.label_sigma_factor)

        sample = extract_sample(
            frame, center, geometry, 1.0, FeatureKind(config.feature_kind), mean_removal=config.mean_removal
        )
        pattern = NormalEquationPattern.build(sample.num_channels, basis, reg_op)
        model = init_model(sample, label, reg_op, basis, gamma=config.gamma, pattern=pattern)
        model = model.with_filter(initial_solve(sample, label, reg_op, basis))
        model = gauss_seidel(model, config.n_gs)

        state = TargetState(center=center, size=(w, h), scale=1.0)
        tracker = cls(config, geometry, basis, weights, reg_op, label, model, state, frame.shape)
        tracker.frame_times.append(time.perf_counter() - started)
        LOG.info(
            "Tracker initialised: grid %dx%d, %d channels, K=%d, nnz(A)=%d.",
            domain.M,
            domain.N,
            sample.num_channels,
            weights.K,
            pattern.nnz,
        )
        return tracker

    def _clamp_center(self, center: Tuple[float, float]) -> Tuple[float, float]:
        height, width = self.frame_shape[:2]
        x = min(max(center[0], 0.0), float(width))
        y = min(max(center[1], 0.0), float(height))
        if (x, y) != center:
            LOG.debug("Center (%.1f, %.1f) clamped to (%.1f, %.1f).", center[0], center[1], x, y)
        return (x, y)

    def step(self, frame: np.ndarray) -> TargetState:
        """
        Track one frame. On any error the tracker keeps its pre-step state.
        """

        started = time.perf_counter()
        frame = _as_frame(frame)
        if frame.shape != self.frame_shape:
            raise InvalidInputError(f"frame shape {frame.shape} differs from the initial {self.frame_shape}")
        config = self.config
        state = self._state

        geometry = self.geometry.with_scale(state.scale)
        detection = multi_scale_detect(frame, state.center, geometry, self._model.f_spectra, config)

        scale = min(max(state.scale * detection.scale_factor, self.min_scale), self.max_scale)
        dx, dy = detection.pixel_offset
        center = self._clamp_center((state.center[0] + dx, state.center[1] + dy))

        geometry = self.geometry.with_scale(scale)
        sample = extract_sample(
            frame, center, geometry, 1.0, FeatureKind(config.feature_kind), mean_removal=config.mean_removal
        )
        model = update_model(self._model, sample, self.label, self.reg_op, self.basis)
        model = gauss_seidel(model, config.n_gs)

        h0, w0 = self.geometry.target_size
        new_state = TargetState(center=center, size=(w0 * scale, h0 * scale), scale=scale)
        self._model = model
        self._state = new_state
        self.last_detection = detection
        self.frame_times.append(time.perf_counter() - started)
        LOG.debug(
            "Frame %d: shift (%.2f, %.2f) px, r=%d, score %.4f, scale %.4f.",
            model.frame_count,
            dx,
            dy,
            detection.scale_index,
            detection.score,
            scale,
        )
        return new_state

    @classmethod
    def run(
        cls,
        frames: Iterable[np.ndarray],
        bbox: Box,
        config: Optional[TrackerConfig] = None,
    ) -> Tuple["Tracker", List[Box]]:
        """Track a whole sequence; the first box is the initial one."""

        iterator = iter(frames)
        try:
            first = next(iterator)
        except StopIteration:
            raise InvalidInputError("cannot track an empty sequence") from None
        tracker = cls.init(first, bbox, config)
        boxes: List[Box] = [validate_box(bbox, tracker.frame_shape)]
        for frame in iterator:
            boxes.append(tracker.step(frame).bbox)
        return tracker, boxes


__all__ = ["MIN_TARGET_CELLS", "TargetState", "Tracker", "scale_bounds", "validate_box"]
