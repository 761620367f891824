from __future__ import annotations

import numpy as np
import pytest
from scipy import ndimage

from srdcf.bench.synth import SynthSpec, render_frames
from srdcf.config import TrackerConfig, build_tracker_config
from srdcf.detection import (
    Detection,
    ScoreField,
    interpolate_score,
    multi_scale_detect,
    scale_exponents,
    score_field,
    signed_frequencies,
    subgrid_maximize,
    unwrap,
)
from srdcf.errors import InvalidInputError
from srdcf.spectral import circular_convolve, fft2, idft2
from srdcf.tracker import Tracker


def _field(spectrum: np.ndarray) -> ScoreField:
    return ScoreField(spectrum=spectrum, grid=idft2(spectrum))


def _bump(size: int, center: tuple[float, float], sigma: float = 2.0) -> ScoreField:
    """Bandlimited Gaussian bump peaking at a continuous ``center``."""

    k = signed_frequencies(size)
    km, kn = np.meshgrid(k, k, indexing="ij")
    envelope = np.exp(-2.0 * (np.pi * sigma / size) ** 2 * (km**2 + kn**2))
    phase = np.exp(-2j * np.pi * (km * center[0] + kn * center[1]) / size)
    return _field(size * size * envelope * phase)


def test_unwrap_is_signed_and_half_open() -> None:
    assert unwrap(3, 8) == 3
    assert unwrap(4, 8) == -4
    assert unwrap(5, 8) == -3
    assert unwrap(-0.5, 8) == pytest.approx(-0.5)
    assert list(signed_frequencies(5)) == [0, 1, 2, -2, -1]


def test_scale_exponents() -> None:
    assert scale_exponents(5) == [-2, -1, 0, 1, 2]
    assert scale_exponents(1) == [0]
    with pytest.raises(InvalidInputError):
        scale_exponents(0)


def test_zero_filter_gives_zero_scores(rng: np.random.Generator) -> None:
    field = score_field(rng.standard_normal((2, 6, 6)), np.zeros((2, 6, 6), dtype=complex))
    assert np.allclose(field.grid, 0.0)


def test_matched_filter_peaks_at_origin(rng: np.random.Generator) -> None:
    sample = rng.standard_normal((1, 8, 8))
    field = score_field(sample, np.conj(fft2(sample)))
    assert np.unravel_index(np.argmax(field.grid), field.grid.shape) == (0, 0)


def test_scores_match_direct_convolution(rng: np.random.Generator) -> None:
    sample = rng.standard_normal((2, 6, 6))
    filters = rng.standard_normal((2, 6, 6))
    field = score_field(sample, fft2(filters))
    direct = sum(circular_convolve(sample[l], filters[l]) for l in range(2))
    assert np.allclose(field.grid, direct, atol=1e-10)
    assert np.allclose(field.grid, idft2(field.spectrum), atol=1e-10)


def test_score_field_rejects_mismatch(rng: np.random.Generator) -> None:
    with pytest.raises(InvalidInputError):
        score_field(rng.standard_normal((2, 6, 6)), np.zeros((3, 6, 6), dtype=complex))


@pytest.mark.parametrize("size", [(7, 7), (8, 6)])
def test_interpolation_hits_grid_values(size, rng: np.random.Generator) -> None:
    field = _field(fft2(rng.standard_normal(size)))
    for m in range(size[0]):
        for n in range(size[1]):
            value, _, _ = interpolate_score(field, float(m), float(n))
            assert value == pytest.approx(field.grid[m, n], abs=1e-10)


def test_interpolation_is_periodic(rng: np.random.Generator) -> None:
    field = _field(fft2(rng.standard_normal((6, 7))))
    for u, v in rng.uniform(-3.0, 9.0, size=(10, 2)):
        value, gradient, hessian = interpolate_score(field, u, v)
        for shifted in [(u + 6.0, v), (u, v + 7.0), (u - 6.0, v - 7.0)]:
            other, other_gradient, other_hessian = interpolate_score(field, *shifted)
            assert other == pytest.approx(value, abs=1e-9)
            assert np.allclose(other_gradient, gradient, atol=1e-8)
            assert np.allclose(other_hessian, hessian, atol=1e-7)


def test_derivatives_match_finite_differences(rng: np.random.Generator) -> None:
    field = _field(fft2(ndimage.gaussian_filter(rng.standard_normal((12, 12)), 1.5, mode="wrap")))
    h = 1e-5
    for _ in range(10):
        u, v = rng.uniform(0, 12, size=2)
        _, gradient, hessian = interpolate_score(field, u, v)
        fd_gradient = np.array(
            [
                (interpolate_score(field, u + h, v)[0] - interpolate_score(field, u - h, v)[0]) / (2 * h),
                (interpolate_score(field, u, v + h)[0] - interpolate_score(field, u, v - h)[0]) / (2 * h),
            ]
        )
        fd_hessian = np.column_stack(
            [
                (interpolate_score(field, u + h, v)[1] - interpolate_score(field, u - h, v)[1]) / (2 * h),
                (interpolate_score(field, u, v + h)[1] - interpolate_score(field, u, v - h)[1]) / (2 * h),
            ]
        )
        assert np.linalg.norm(gradient - fd_gradient) <= 1e-5 * max(np.linalg.norm(gradient), 1e-3)
        assert np.linalg.norm(hessian - fd_hessian) <= 1e-5 * max(np.linalg.norm(hessian), 1e-3)


def test_constant_field_has_no_derivatives() -> None:
    spectrum = np.zeros((6, 6), dtype=complex)
    spectrum[0, 0] = 36.0 * 2.5
    value, gradient, hessian = interpolate_score(_field(spectrum), 1.3, 4.2)
    assert value == pytest.approx(2.5)
    assert np.all(gradient == 0.0)
    assert np.all(hessian == 0.0)


def test_peak_on_grid_point_is_kept() -> None:
    peak = subgrid_maximize(_bump(16, (3.0, 5.0)))
    assert peak.u == pytest.approx(3.0, abs=1e-6)
    assert peak.v == pytest.approx(5.0, abs=1e-6)
    assert peak.iterations <= 1


def test_off_grid_peak_is_recovered() -> None:
    field = _bump(16, (2.3, 4.7))
    peak = subgrid_maximize(field, max_iters=5)
    assert peak.u == pytest.approx(2.3, abs=1e-3)
    assert peak.v == pytest.approx(4.7, abs=1e-3)
    assert peak.score >= field.grid.max()

    # dense 0.001-step search around the refined peak agrees
    offsets = np.arange(-0.02, 0.0201, 0.001)
    best = max(
        (interpolate_score(field, peak.u + du, peak.v + dv)[0], du, dv) for du in offsets for dv in offsets
    )
    assert abs(best[1]) <= 1e-3 and abs(best[2]) <= 1e-3


def test_flat_field_returns_origin() -> None:
    spectrum = np.zeros((8, 8), dtype=complex)
    spectrum[0, 0] = 64.0
    peak = subgrid_maximize(_field(spectrum))
    assert (peak.u, peak.v) == (0.0, 0.0)
    assert peak.score == pytest.approx(1.0)


def test_refinement_never_loses_to_grid(rng: np.random.Generator) -> None:
    for _ in range(25):
        field = _field(fft2(rng.standard_normal((10, 10))))
        peak = subgrid_maximize(field)
        assert peak.score >= field.grid.max() - 1e-9


def test_pixel_offset_swaps_axes() -> None:
    detection = Detection(
        displacement=(1.5, -2.0),
        scale_index=0,
        scale_factor=1.0,
        score=1.0,
        newton_iters=0,
        pixels_per_cell=4.0,
    )
    assert detection.pixel_offset == (-8.0, 6.0)


def _first_frame_tracker(config: TrackerConfig):
    frames, boxes = render_frames(SynthSpec(frames=2, motion=(0.0, 0.0), seed=3))
    return frames[0], Tracker.init(frames[0], boxes[0], config)


def test_single_scale_detection_on_training_frame() -> None:
    config = TrackerConfig(num_scales=1)
    frame, tracker = _first_frame_tracker(config)
    detection = multi_scale_detect(frame, tracker.state.center, tracker.geometry, tracker.model.f_spectra, config)
    assert detection.scale_index == 0
    assert detection.scale_factor == 1.0
    assert abs(detection.displacement[0]) < 0.5
    assert abs(detection.displacement[1]) < 0.5


def test_static_scene_detects_at_center() -> None:
    config = TrackerConfig()
    frame, tracker = _first_frame_tracker(config)
    detection = multi_scale_detect(frame, tracker.state.center, tracker.geometry, tracker.model.f_spectra, config)
    assert detection.scale_index == 0
    assert np.hypot(*detection.displacement) < 0.5


@pytest.mark.slow
def test_zoomed_scene_moves_one_scale_step() -> None:
    config = TrackerConfig()
    frame, tracker = _first_frame_tracker(config)
    cx, cy = tracker.state.center
    a = config.scale_step
    rows, cols = np.indices(frame.shape, dtype=np.float64)
    # pixel centres sit at index + 0.5
    src_rows = cy + (rows + 0.5 - cy) / a - 0.5
    src_cols = cx + (cols + 0.5 - cx) / a - 0.5
    zoomed = ndimage.map_coordinates(frame.astype(np.float64), [src_rows, src_cols], order=3, mode="nearest")
    zoomed = np.clip(np.rint(zoomed), 0, 255).astype(np.uint8)

    detection = multi_scale_detect(zoomed, (cx, cy), tracker.geometry, tracker.model.f_spectra, config)
    assert detection.scale_index == 1
    assert detection.scale_factor == pytest.approx(a)


def test_scale_levels_are_scored_independently() -> None:
    config = build_tracker_config(overrides={"featureKind": "grayscale"})
    frame, tracker = _first_frame_tracker(config)
    shifted = np.roll(frame, (3, -2), axis=(0, 1))
    args = (shifted, tracker.state.center, tracker.geometry, tracker.model.f_spectra, config)

    ordered = multi_scale_detect(*args, exponents=[-2, -1, 0, 1, 2])
    shuffled = multi_scale_detect(*args, exponents=[2, 0, -2, 1, -1])
    assert shuffled == ordered

    singles = {r: multi_scale_detect(*args, exponents=[r]) for r in range(-2, 3)}
    assert ordered.score == max(single.score for single in singles.values())
    assert singles[ordered.scale_index] == ordered


def test_detection_needs_a_scale_level() -> None:
    config = build_tracker_config("baseline-grayscale")
    frame, tracker = _first_frame_tracker(config)
    with pytest.raises(InvalidInputError):
        multi_scale_detect(frame, tracker.state.center, tracker.geometry, tracker.model.f_spectra, config, exponents=[])
