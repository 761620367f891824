"""
Exception hierarchy shared by the tracker library and the CLI.
"""

from __future__ import annotations


class SRDCFError(RuntimeError):
    """Base class for tracker related errors."""


class InvalidInputError(SRDCFError, ValueError):
    """Raised when array shapes, boxes or geometry are unusable."""


class InvalidConfigError(SRDCFError, ValueError):
    """Raised when a configuration value or document is rejected."""


class SymmetryViolationError(SRDCFError):
    """Raised when a spectrum that must be Hermitian is not."""


class SingularSystemError(SRDCFError):
    """Raised when a linear system cannot be solved (zero pivot, failed factorization)."""


class IngestionError(SRDCFError):
    """Raised when a sequence directory or box file cannot be loaded."""


class SpecValidationError(SRDCFError, ValueError):
    """Raised when synthetic sequence parameters are inconsistent."""


class SnapshotError(SRDCFError):
    """Raised when a model snapshot is malformed or of an unsupported version."""


__all__ = [
    "SRDCFError",
    "InvalidInputError",
    "InvalidConfigError",
    "SymmetryViolationError",
    "SingularSystemError",
    "IngestionError",
    "SpecValidationError",
    "SnapshotError",
]
