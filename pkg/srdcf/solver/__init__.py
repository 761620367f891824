"""
Normal-equation model: assembly, online updates and solvers.
"""

from __future__ import annotations

from .model import (
    DEFAULT_GAMMA,
    ModelState,
    gauss_seidel,
    gauss_seidel_sweeps,
    init_model,
    initial_solve,
    loss_fourier,
    loss_real,
    loss_spatial,
    solve_to_tolerance,
    update_model,
)
from .operators import DataOperator, NormalEquationPattern, build_data_operator
from .snapshot import load_snapshot, save_snapshot

__all__ = [
    "DEFAULT_GAMMA",
    "DataOperator",
    "ModelState",
    "NormalEquationPattern",
    "build_data_operator",
    "gauss_seidel",
    "gauss_seidel_sweeps",
    "init_model",
    "initial_solve",
    "load_snapshot",
    "loss_fourier",
    "loss_real",
    "loss_spatial",
    "save_snapshot",
    "solve_to_tolerance",
    "update_model",
]
