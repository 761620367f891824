"""
Deterministic synthetic sequences: a value-noise textured rectangle moving and
scaling over a value-noise background, with exact ground truth.

Target and background intensities come from disjoint bands so the target is
always separable from its surroundings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Tuple

import numpy as np
from PIL import Image
from scipy import ndimage

from ..errors import SpecValidationError
from ..features import Box
from .sequences import GROUND_TRUTH_FILE, IMAGE_DIR, Sequence, write_boxes

LOG = logging.getLogger(__name__)

BACKGROUND_BAND = (20.0, 110.0)
TARGET_BAND = (140.0, 235.0)
TEXTURE_SIZE = 64


@dataclass(frozen=True, slots=True)
class SynthSpec:
    frames: int = 64
    width: int = 320
    height: int = 240
    box: Box = (60.0, 100.0, 40.0, 40.0)
    motion: Tuple[float, float] = (3.0, 0.0)
    scale_rate: float = 0.0
    clutter: int = 0
    noise: float = 0.0
    seed: int = 0

    def boxes(self) -> List[Box]:
        """Ground truth: the centre moves linearly, the size grows geometrically."""

        x, y, w, h = self.box
        cx, cy = x + w / 2.0, y + h / 2.0
        out: List[Box] = []
        for t in range(self.frames):
            growth = (1.0 + self.scale_rate) ** t
            bw, bh = w * growth, h * growth
            ccx, ccy = cx + self.motion[0] * t, cy + self.motion[1] * t
            out.append((ccx - bw / 2.0, ccy - bh / 2.0, bw, bh))
        return out


def check_spec(spec: SynthSpec) -> List[Box]:
    if spec.frames < 2:
        raise SpecValidationError(f"a sequence needs at least 2 frames, got {spec.frames}")
    if spec.width < 8 or spec.height < 8:
        raise SpecValidationError(f"frame size {spec.width}x{spec.height} is too small")
    if spec.box[2] <= 0 or spec.box[3] <= 0:
        raise SpecValidationError(f"initial box must have positive size, got {spec.box}")
    if spec.scale_rate <= -1.0:
        raise SpecValidationError(f"scale rate must be greater than -1, got {spec.scale_rate}")
    if spec.clutter < 0 or spec.noise < 0:
        raise SpecValidationError("clutter and noise must be non-negative")
    boxes = spec.boxes()
    for t, (x, y, w, h) in enumerate(boxes):
        if x + w <= 0 or y + h <= 0 or x >= spec.width or y >= spec.height:
            raise SpecValidationError(f"target leaves the {spec.width}x{spec.height} frame entirely at frame {t + 1}")
    return boxes


def value_noise(rng: np.random.Generator, shape: Tuple[int, int], cell: int, octaves: int = 2) -> np.ndarray:
    """Smooth noise in ``[0, 1]``: cubic-upsampled random lattices, halving the cell per octave."""

    total = np.zeros(shape)
    amplitude = 1.0
    for octave in range(octaves):
        step = max(1, cell >> octave)
        lattice = rng.random((shape[0] // step + 4, shape[1] // step + 4))
        fine = ndimage.zoom(lattice, step, order=3, mode="nearest")
        total += amplitude * fine[: shape[0], : shape[1]]
        amplitude *= 0.5
    low, high = float(total.min()), float(total.max())
    return (total - low) / (high - low) if high > low else np.zeros(shape)


def to_band(texture: np.ndarray, band: Tuple[float, float]) -> np.ndarray:
    return band[0] + texture * (band[1] - band[0])


def draw_patch(image: np.ndarray, texture: np.ndarray, box: Box) -> None:
    """Paint ``texture`` stretched over ``box`` (bilinear), in place."""

    x, y, w, h = box
    height, width = image.shape
    c0, c1 = max(0, math.floor(x)), min(width, math.ceil(x + w))
    r0, r1 = max(0, math.floor(y)), min(height, math.ceil(y + h))
    if c0 >= c1 or r0 >= r1:
        return
    u = (np.arange(r0, r1) + 0.5 - y) / h
    v = (np.arange(c0, c1) + 0.5 - x) / w
    inside = ((u >= 0) & (u < 1))[:, None] & ((v >= 0) & (v < 1))[None, :]
    th, tw = texture.shape
    grid_u, grid_v = np.meshgrid(u * th - 0.5, v * tw - 0.5, indexing="ij")
    values = ndimage.map_coordinates(texture, np.stack([grid_u, grid_v]), order=1, mode="nearest")
    region = image[r0:r1, c0:c1]
    region[inside] = values[inside]


def _clutter_boxes(rng: np.random.Generator, spec: SynthSpec, boxes: List[Box]) -> List[Box]:
    out: List[Box] = []
    for _ in range(spec.clutter):
        x, y, w, h = boxes[int(rng.integers(len(boxes)))]
        angle = rng.uniform(0.0, 2.0 * math.pi)
        distance = rng.uniform(1.3, 1.8) * max(w, h)
        size = rng.uniform(0.8, 1.2)
        cx = x + w / 2.0 + distance * math.cos(angle)
        cy = y + h / 2.0 + distance * math.sin(angle)
        out.append((cx - w * size / 2.0, cy - h * size / 2.0, w * size, h * size))
    return out


def render_frames(spec: SynthSpec) -> Tuple[List[np.ndarray], List[Box]]:
    boxes = check_spec(spec)
    rng = np.random.default_rng(spec.seed)
    background = to_band(value_noise(rng, (spec.height, spec.width), cell=16), BACKGROUND_BAND)
    target = to_band(value_noise(rng, (TEXTURE_SIZE, TEXTURE_SIZE), cell=8), TARGET_BAND)

    scene = background.copy()
    for box in _clutter_boxes(rng, spec, boxes):
        distractor = to_band(value_noise(rng, (TEXTURE_SIZE, TEXTURE_SIZE), cell=8), TARGET_BAND)
        draw_patch(scene, distractor, box)

    frames: List[np.ndarray] = []
    for box in boxes:
        image = scene.copy()
        draw_patch(image, target, box)
        if spec.noise > 0:
            image = image + rng.normal(0.0, spec.noise, image.shape)
        frames.append(np.clip(np.rint(image), 0, 255).astype(np.uint8))
    return frames, boxes


def synth_sequence(spec: SynthSpec, directory: str | Path) -> Sequence:
    """Write an OTB-layout sequence (PNG frames, 1-indexed ground truth)."""

    directory = Path(directory)
    frames, boxes = render_frames(spec)
    image_dir = directory / IMAGE_DIR
    image_dir.mkdir(parents=True, exist_ok=True)
    paths: List[Path] = []
    for index, frame in enumerate(frames, start=1):
        path = image_dir / f"{index:04d}.png"
        Image.fromarray(frame).save(path, format="PNG")
        paths.append(path)
    write_boxes(directory / GROUND_TRUTH_FILE, boxes, one_indexed=True, precision=None)
    LOG.info("Synthesised %d frames into %s.", len(frames), directory)
    return Sequence(name=directory.name, frames=paths, ground_truth=boxes)


def ablation_suite(directory: str | Path, seed: int = 0, count: int = 10, frames: int = 48) -> List[Path]:
    """
    ``count`` cluttered sequences with random slow drifts, written under
    ``directory/seq_XX``.
    """

    directory = Path(directory)
    rng = np.random.default_rng(seed)
    base = SynthSpec(frames=frames, clutter=3)
    paths: List[Path] = []
    for index in range(count):
        motion = (float(rng.uniform(-2.0, 2.0)), float(rng.uniform(-1.5, 1.5)))
        size = float(rng.uniform(32.0, 44.0))
        cx = base.width / 2.0 - motion[0] * (frames - 1) / 2.0
        cy = base.height / 2.0 - motion[1] * (frames - 1) / 2.0
        spec = replace(
            base,
            box=(cx - size / 2.0, cy - size / 2.0, size, size),
            motion=motion,
            seed=int(rng.integers(2**31)),
        )
        path = directory / f"seq_{index:02d}"
        synth_sequence(spec, path)
        paths.append(path)
    return paths


__all__ = [
    "SynthSpec",
    "ablation_suite",
    "check_spec",
    "draw_patch",
    "render_frames",
    "synth_sequence",
    "value_noise",
]
