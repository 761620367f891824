"""
Overlap metrics: IoU, success curve, AUC and centre-distance precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError
from ..features import Box

THRESHOLDS = np.arange(101) / 100.0
DISTANCE_THRESHOLD = 20.0


@dataclass(frozen=True, eq=False)
class EvalReport:
    per_frame_iou: np.ndarray
    success_curve: np.ndarray
    op_at_half: float
    auc: float
    precision20: float
    center_errors: np.ndarray

    @property
    def mean_iou(self) -> float:
        return float(np.mean(self.per_frame_iou))

    @property
    def thresholds(self) -> np.ndarray:
        return THRESHOLDS


def _as_boxes(boxes: Sequence[Box] | np.ndarray, what: str) -> np.ndarray:
    array = np.asarray(boxes, dtype=np.float64)
    if array.ndim == 1:
        array = array[None, :]
    if array.ndim != 2 or array.shape[1] != 4:
        raise InvalidInputError(f"{what} must be (x, y, w, h) boxes, got shape {array.shape}")
    if np.any(array[:, 2] <= 0) or np.any(array[:, 3] <= 0):
        raise InvalidInputError(f"{what} contain a box with non-positive area")
    return array


def overlaps(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Row-wise IoU of two ``(n, 4)`` box arrays."""

    x1 = np.maximum(first[:, 0], second[:, 0])
    y1 = np.maximum(first[:, 1], second[:, 1])
    x2 = np.minimum(first[:, 0] + first[:, 2], second[:, 0] + second[:, 2])
    y2 = np.minimum(first[:, 1] + first[:, 3], second[:, 1] + second[:, 3])
    inter = np.maximum(x2 - x1, 0.0) * np.maximum(y2 - y1, 0.0)
    union = first[:, 2] * first[:, 3] + second[:, 2] * second[:, 3] - inter
    return np.clip(inter / union, 0.0, 1.0)


def iou(box_a: Box, box_b: Box) -> float:
    a = _as_boxes([box_a], "box A")
    b = _as_boxes([box_b], "box B")
    return float(overlaps(a, b)[0])


def evaluate(predictions: Sequence[Box] | np.ndarray, ground_truth: Sequence[Box] | np.ndarray) -> EvalReport:
    """
    Per-frame IoU, the 101-point success curve (strict ``>`` at every threshold)
    and its mean as AUC.
    """

    if len(predictions) != len(ground_truth):
        raise InvalidInputError(f"{len(predictions)} predictions but {len(ground_truth)} ground-truth boxes")
    if len(predictions) == 0:
        raise InvalidInputError("nothing to evaluate: no boxes")
    pred = _as_boxes(predictions, "predictions")
    gt = _as_boxes(ground_truth, "ground truth")

    per_frame = overlaps(pred, gt)
    curve = np.mean(per_frame[:, None] > THRESHOLDS[None, :], axis=0)
    centers_pred = pred[:, :2] + pred[:, 2:] / 2.0
    centers_gt = gt[:, :2] + gt[:, 2:] / 2.0
    errors = np.linalg.norm(centers_pred - centers_gt, axis=1)
    return EvalReport(
        per_frame_iou=per_frame,
        success_curve=curve,
        op_at_half=float(curve[50]),
        auc=float(np.mean(curve)),
        precision20=float(np.mean(errors <= DISTANCE_THRESHOLD)),
        center_errors=errors,
    )


def write_curve(path: str | Path, report: EvalReport) -> Path:
    path = Path(path)
    lines = ["threshold,op"]
    lines.extend(f"{threshold:.2f},{op:.6f}" for threshold, op in zip(report.thresholds, report.success_curve))
    lines.append(f"# auc={report.auc:.6f} op50={report.op_at_half:.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


__all__ = ["DISTANCE_THRESHOLD", "EvalReport", "THRESHOLDS", "evaluate", "iou", "overlaps", "write_curve"]
