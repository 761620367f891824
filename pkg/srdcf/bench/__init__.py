"""
Evaluation harness: sequence I/O, metrics, synthetic sequences and batch runs.
"""

from __future__ import annotations

from .metrics import EvalReport, evaluate, iou, write_curve
from .runner import AblationReport, TrackResult, run_ablation, track_sequence
from .sequences import Sequence, load_sequence, read_boxes, write_boxes, write_predictions
from .synth import SynthSpec, ablation_suite, synth_sequence

__all__ = [
    "AblationReport",
    "EvalReport",
    "Sequence",
    "SynthSpec",
    "TrackResult",
    "ablation_suite",
    "evaluate",
    "iou",
    "load_sequence",
    "read_boxes",
    "run_ablation",
    "synth_sequence",
    "track_sequence",
    "write_boxes",
    "write_curve",
    "write_predictions",
]
