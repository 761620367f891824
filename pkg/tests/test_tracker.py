from __future__ import annotations

import numpy as np
import pytest

from srdcf.bench.metrics import evaluate
from srdcf.bench.synth import SynthSpec, render_frames
from srdcf.config import TrackerConfig, build_tracker_config
from srdcf.errors import InvalidInputError
from srdcf.tracker import TargetState, Tracker, scale_bounds, validate_box


def test_target_state_bbox() -> None:
    state = TargetState(center=(50.0, 40.0), size=(20.0, 10.0), scale=1.0)
    assert state.bbox == (40.0, 35.0, 20.0, 10.0)


@pytest.mark.parametrize(
    "box",
    [
        (10.0, 10.0, 0.0, 5.0),
        (10.0, 10.0, 5.0, -1.0),
        (500.0, 10.0, 10.0, 10.0),
        (10.0, float("nan"), 10.0, 10.0),
        (1.0, 2.0, 3.0),
    ],
)
def test_validate_box_rejects(box) -> None:
    with pytest.raises(InvalidInputError):
        validate_box(box, (100, 200))


def test_validate_box_accepts_partially_outside_box() -> None:
    assert validate_box((-5.0, -5.0, 20.0, 20.0), (100, 100)) == (-5.0, -5.0, 20.0, 20.0)


def test_scale_bounds_contain_unit_scale() -> None:
    frames, boxes = render_frames(SynthSpec(frames=2))
    tracker = Tracker.init(frames[0], boxes[0], TrackerConfig(feature_kind="grayscale", num_scales=1))
    low, high = scale_bounds(tracker.config, tracker.geometry, frames[0].shape)
    assert low <= 1.0 <= high
    # 10 cells may shrink to 5; the 40 px target fits 6 times into the 240 px height
    assert low == pytest.approx(1.02 ** -35)
    assert high == pytest.approx(1.02 ** 90)


def test_init_rejects_sub_cell_target() -> None:
    frame = np.zeros((60, 60), dtype=np.uint8)
    with pytest.raises(InvalidInputError):
        Tracker.init(frame, (30.0, 30.0, 2.0, 2.0))


def test_run_rejects_empty_sequence() -> None:
    with pytest.raises(InvalidInputError):
        Tracker.run([], (0.0, 0.0, 10.0, 10.0))


def test_failed_step_keeps_state() -> None:
    frames, boxes = render_frames(SynthSpec(frames=3))
    tracker = Tracker.init(frames[0], boxes[0], build_tracker_config("baseline-grayscale"))
    before_state, before_model = tracker.state, tracker.model
    with pytest.raises(InvalidInputError):
        tracker.step(np.zeros((10, 10), dtype=np.uint8))
    assert tracker.state is before_state
    assert tracker.model is before_model


def test_grayscale_baseline_follows_slow_motion() -> None:
    spec = SynthSpec(frames=12, motion=(2.0, 1.0), seed=5)
    frames, truth = render_frames(spec)
    tracker, boxes = Tracker.run(frames, truth[0], build_tracker_config("baseline-grayscale"))
    assert len(boxes) == len(frames)
    assert boxes[0] == truth[0]
    assert tracker.model.frame_count == len(frames)
    assert len(tracker.frame_times) == len(frames)
    assert evaluate(boxes, truth).mean_iou > 0.6


def test_step_reports_last_detection() -> None:
    frames, boxes = render_frames(SynthSpec(frames=2, motion=(0.0, 0.0)))
    tracker = Tracker.init(frames[0], boxes[0], build_tracker_config("baseline-grayscale"))
    state = tracker.step(frames[1])
    assert tracker.last_detection is not None
    assert state.scale == 1.0
    assert abs(state.center[0] - 80.0) < 2.0
    assert abs(state.center[1] - 120.0) < 2.0


@pytest.mark.slow
def test_translation_sequence() -> None:
    spec = SynthSpec(frames=64, motion=(3.0, 0.0), seed=0)
    frames, truth = render_frames(spec)
    _, boxes = Tracker.run(frames, truth[0], TrackerConfig())
    report = evaluate(boxes, truth)
    assert report.mean_iou >= 0.8
    assert report.op_at_half == 1.0


@pytest.mark.slow
def test_scale_sequence() -> None:
    spec = SynthSpec(frames=64, motion=(1.0, 0.0), scale_rate=0.005, seed=1)
    frames, truth = render_frames(spec)
    tracker, _ = Tracker.run(frames, truth[0], TrackerConfig())
    expected = (1.0 + spec.scale_rate) ** (spec.frames - 1)
    assert abs(tracker.state.scale / expected - 1.0) < 0.10


@pytest.mark.slow
def test_tracking_is_deterministic() -> None:
    frames, truth = render_frames(SynthSpec(frames=16, motion=(3.0, 1.0), seed=2))
    _, first = Tracker.run(frames, truth[0], TrackerConfig())
    _, second = Tracker.run(frames, truth[0], TrackerConfig())
    assert first == second


def _grayscale(**overrides) -> TrackerConfig:
    return build_tracker_config("baseline-grayscale", {"subgrid": True, **overrides})


def test_static_scene_does_not_drift() -> None:
    frames, truth = render_frames(SynthSpec(frames=2, motion=(0.0, 0.0), seed=7, clutter=2))
    tracker = Tracker.init(frames[0], truth[0], _grayscale())
    start = tracker.state.center
    for _ in range(20):
        tracker.step(frames[0])
    end = tracker.state.center
    assert np.hypot(end[0] - start[0], end[1] - start[1]) / 20 < 0.1
    assert tracker.state.scale == 1.0


def test_frozen_model_still_follows_translation() -> None:
    frames, truth = render_frames(SynthSpec(frames=10, motion=(2.0, 1.0), seed=5))
    tracker = Tracker.init(frames[0], truth[0], _grayscale(gamma=0.0))
    A, b = tracker.model.A.data.copy(), tracker.model.b.copy()
    boxes = [truth[0]] + [tracker.step(frame).bbox for frame in frames[1:]]
    assert np.array_equal(tracker.model.A.data, A)
    assert np.array_equal(tracker.model.b, b)
    assert tracker.model.frame_count == len(frames)
    assert evaluate(boxes, truth).mean_iou > 0.6


def test_interleaved_trackers_match_separate_runs() -> None:
    config = _grayscale()
    first_frames, first_truth = render_frames(SynthSpec(frames=6, motion=(2.0, 0.0), seed=1))
    second_frames, second_truth = render_frames(SynthSpec(frames=6, motion=(-1.0, 1.5), seed=9, clutter=1))
    _, first_alone = Tracker.run(first_frames, first_truth[0], config)
    _, second_alone = Tracker.run(second_frames, second_truth[0], config)

    first = Tracker.init(first_frames[0], first_truth[0], config)
    second = Tracker.init(second_frames[0], second_truth[0], config)
    first_boxes, second_boxes = [first_truth[0]], [second_truth[0]]
    for a, b in zip(first_frames[1:], second_frames[1:]):
        first_boxes.append(first.step(a).bbox)
        second_boxes.append(second.step(b).bbox)
    assert first_boxes == first_alone
    assert second_boxes == second_alone
