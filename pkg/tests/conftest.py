"""Test helpers for the SRDCF tracker."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest


ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20151207)


@pytest.fixture
def debug_checks():
    from srdcf.debug import debug_enabled, set_debug

    previous = debug_enabled()
    set_debug(True)
    yield
    set_debug(previous)
