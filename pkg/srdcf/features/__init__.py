"""
Sample extraction: geometry, windowing, labels and HOG/grayscale features.
"""

from __future__ import annotations

from .geometry import Box, SampleGeometry, box_center
from .hog import NUM_CHANNELS as HOG_CHANNELS
from .hog import fhog
from .sampling import FeatureKind, FeatureMap, extract_sample, sample_patch, to_luminance
from .windows import LabelMap, centered_offsets, gaussian_label, hann_window

__all__ = [
    "Box",
    "FeatureKind",
    "FeatureMap",
    "HOG_CHANNELS",
    "LabelMap",
    "SampleGeometry",
    "box_center",
    "centered_offsets",
    "extract_sample",
    "fhog",
    "gaussian_label",
    "hann_window",
    "sample_patch",
    "to_luminance",
]
