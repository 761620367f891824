"""
Spatially regularized discriminative correlation filter tracker.

The package learns a multi-channel filter online in the Fourier domain under a
spatial penalty, solves the normal equations with Gauss-Seidel sweeps, and
detects over a scale pyramid with sub-grid peak refinement.  ``srdcf.bench``
holds the evaluation harness.
"""

from __future__ import annotations

from .config import RunConfig, TrackerConfig, build_tracker_config
from .errors import SRDCFError
from .tracker import TargetState, Tracker

__all__ = [
    "RunConfig",
    "SRDCFError",
    "TargetState",
    "Tracker",
    "TrackerConfig",
    "build_tracker_config",
]
