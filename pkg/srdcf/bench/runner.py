"""
Run the tracker over sequences and compare configurations.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence as SequenceType, Tuple

import numpy as np

from ..config import TrackerConfig, build_tracker_config
from ..errors import IngestionError
from ..features import Box
from ..tracker import Tracker
from .metrics import EvalReport, evaluate
from .sequences import Sequence, load_sequence

LOG = logging.getLogger(__name__)

ABLATION_PROFILES = ("srdcf", "uniform-expanded", "uniform-conventional")


@dataclass
class TrackResult:
    sequence: str
    boxes: List[Box]
    frame_times: List[float]
    report: Optional[EvalReport] = None

    @property
    def fps(self) -> float:
        total = sum(self.frame_times)
        return len(self.frame_times) / total if total > 0 else 0.0


@dataclass
class AblationReport:
    per_sequence: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def mean_iou(self, profile: str) -> float:
        values = self.per_sequence.get(profile, {})
        return float(np.mean(list(values.values()))) if values else 0.0

    def summary(self) -> Dict[str, float]:
        return {profile: self.mean_iou(profile) for profile in self.per_sequence}


def track_sequence(sequence: Sequence, config: TrackerConfig, init_box: Optional[Box] = None) -> TrackResult:
    """Track every frame; the initial box defaults to the first ground-truth box."""

    if init_box is None:
        if not sequence.ground_truth:
            raise IngestionError(f"sequence {sequence.name} has no ground truth to initialise from")
        init_box = sequence.ground_truth[0]
    tracker, boxes = Tracker.run(sequence.iter_frames(), init_box, config)
    report = evaluate(boxes, sequence.ground_truth) if sequence.ground_truth else None
    if report is not None:
        LOG.info(
            "%s: %d frames, mean IoU %.3f, op50 %.3f, auc %.3f, %.1f fps.",
            sequence.name,
            len(boxes),
            report.mean_iou,
            report.op_at_half,
            report.auc,
            tracker.fps,
        )
    return TrackResult(
        sequence=sequence.name,
        boxes=boxes,
        frame_times=list(tracker.frame_times),
        report=report,
    )


def _ablation_task(task: Tuple[str, str]) -> Tuple[str, str, float]:
    profile, directory = task
    sequence = load_sequence(directory, require_ground_truth=True)
    result = track_sequence(sequence, build_tracker_config(profile))
    assert result.report is not None
    return profile, sequence.name, result.report.mean_iou


def run_ablation(
    directories: Iterable[str | Path],
    profiles: SequenceType[str] = ABLATION_PROFILES,
    jobs: int = 1,
) -> AblationReport:
    """
    Mean IoU of every profile on every sequence. ``jobs > 1`` spreads
    sequences over worker processes; each tracker stays in one process.
    """

    directories = [str(directory) for directory in directories]
    tasks = [(profile, directory) for profile in profiles for directory in directories]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(_ablation_task, tasks))
    else:
        results = [_ablation_task(task) for task in tasks]

    report = AblationReport()
    for profile, name, mean_iou in results:
        report.per_sequence.setdefault(profile, {})[name] = mean_iou
    for profile, value in report.summary().items():
        LOG.info("Profile %s: mean IoU %.3f over %d sequences.", profile, value, len(report.per_sequence[profile]))
    return report


__all__ = ["ABLATION_PROFILES", "AblationReport", "TrackResult", "run_ablation", "track_sequence"]
