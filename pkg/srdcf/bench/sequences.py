"""
OTB-layout sequences: ``<seq>/img/0001.jpg ...`` and ``<seq>/groundtruth_rect.txt``.

Ground truth on disk is 1-indexed; every box in memory is 0-indexed.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence as SequenceType

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import IngestionError
from ..features import Box

LOG = logging.getLogger(__name__)

IMAGE_DIR = "img"
GROUND_TRUTH_FILE = "groundtruth_rect.txt"
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".pgm", ".ppm", ".tif", ".tiff"}
_SEPARATORS = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class Sequence:
    name: str
    frames: List[Path]
    ground_truth: Optional[List[Box]] = None

    def __len__(self) -> int:
        return len(self.frames)

    def load_frame(self, index: int) -> np.ndarray:
        return load_image(self.frames[index])

    def iter_frames(self) -> Iterator[np.ndarray]:
        for path in self.frames:
            yield load_image(path)


def load_image(path: Path) -> np.ndarray:
    """8-bit grayscale or RGB array."""

    try:
        with Image.open(path) as image:
            if image.mode not in ("L", "RGB"):
                image = image.convert("RGB")
            return np.asarray(image, dtype=np.uint8).copy()
    except (OSError, UnidentifiedImageError) as exc:
        raise IngestionError(f"cannot decode image {path}: {exc}") from exc


def parse_box_line(line: str, path: Path, lineno: int) -> Box:
    fields = [field for field in _SEPARATORS.split(line.strip()) if field]
    if len(fields) != 4:
        raise IngestionError(f"{path}:{lineno}: expected 4 numbers, found {len(fields)}")
    try:
        x, y, w, h = (float(field) for field in fields)
    except ValueError as exc:
        raise IngestionError(f"{path}:{lineno}: cannot parse {line.strip()!r}") from exc
    if not (w > 0 and h > 0):
        raise IngestionError(f"{path}:{lineno}: box width and height must be positive")
    return (x, y, w, h)


def read_boxes(path: str | Path, one_indexed: bool = False) -> List[Box]:
    """One ``x,y,w,h`` box per line (commas, tabs or spaces); blank lines ignored."""

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read box file {path}: {exc}") from exc
    offset = 1.0 if one_indexed else 0.0
    boxes: List[Box] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        x, y, w, h = parse_box_line(line, path, lineno)
        boxes.append((x - offset, y - offset, w, h))
    return boxes


def write_boxes(path: str | Path, boxes: SequenceType[Box], one_indexed: bool = False, precision: Optional[int] = 2) -> Path:
    path = Path(path)
    offset = 1.0 if one_indexed else 0.0

    def fmt(value: float) -> str:
        return f"{value:.{precision}f}" if precision is not None else repr(float(value))

    lines = [
        ",".join(fmt(value) for value in (x + offset, y + offset, w, h))
        for x, y, w, h in boxes
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_predictions(path: str | Path, boxes: SequenceType[Box]) -> Path:
    """0-indexed ``x,y,w,h`` with two decimals, one line per frame."""

    return write_boxes(path, boxes, one_indexed=False, precision=2)


def _frame_number(path: Path) -> Optional[int]:
    return int(path.stem) if path.stem.isdigit() else None


def load_sequence(directory: str | Path, require_ground_truth: bool = False) -> Sequence:
    directory = Path(directory)
    image_dir = directory / IMAGE_DIR
    if not image_dir.is_dir():
        raise IngestionError(f"{directory} has no {IMAGE_DIR}/ directory")

    numbered = []
    for path in image_dir.iterdir():
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        number = _frame_number(path)
        if number is None:
            raise IngestionError(f"frame file {path.name} is not numerically named")
        numbered.append((number, path))
    if not numbered:
        raise IngestionError(f"{image_dir} contains no images")
    numbered.sort()

    numbers = [number for number, _ in numbered]
    if len(set(numbers)) != len(numbers):
        raise IngestionError(f"{image_dir} has duplicate frame numbers")
    expected = range(numbers[0], numbers[0] + len(numbers))
    for want, have in zip(expected, numbers):
        if want != have:
            raise IngestionError(f"frame {want:04d} is missing from {image_dir} (next is {have:04d})")
    frames = [path for _, path in numbered]

    gt_path = directory / GROUND_TRUTH_FILE
    ground_truth: Optional[List[Box]] = None
    if gt_path.is_file():
        ground_truth = read_boxes(gt_path, one_indexed=True)
        if len(ground_truth) != len(frames):
            raise IngestionError(
                f"{gt_path} has {len(ground_truth)} boxes for {len(frames)} frames"
            )
    elif require_ground_truth:
        raise IngestionError(f"{directory} has no {GROUND_TRUTH_FILE}")

    LOG.info("Loaded sequence %s: %d frames%s.", directory.name, len(frames), "" if ground_truth else " (no ground truth)")
    return Sequence(name=directory.name, frames=frames, ground_truth=ground_truth)


__all__ = [
    "GROUND_TRUTH_FILE",
    "IMAGE_DIR",
    "Sequence",
    "load_image",
    "load_sequence",
    "read_boxes",
    "write_boxes",
    "write_predictions",
]
