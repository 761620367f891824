"""
Process-wide switch for expensive consistency checks.

Debug checks (Hermitian symmetry of spectra fed to the real transform, SPD
guards on small Gram matrices) are off by default and can be enabled with
``SRDCF_DEBUG=1`` or :func:`set_debug`.
"""

from __future__ import annotations

import os
import threading

ENV_DEBUG_VAR = "SRDCF_DEBUG"

_LOCK = threading.Lock()
_ENABLED = os.environ.get(ENV_DEBUG_VAR, "").strip().lower() in {"1", "true", "yes", "on"}


def debug_enabled() -> bool:
    return _ENABLED


def set_debug(enabled: bool) -> None:
    global _ENABLED
    with _LOCK:
        _ENABLED = bool(enabled)
