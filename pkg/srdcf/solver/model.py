"""
Online normal equations: first-frame assembly, exponential-forgetting updates,
the direct first-frame solve and fixed-count Gauss-Seidel sweeps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from pyamg.relaxation.relaxation import gauss_seidel as _relax_gauss_seidel
from scipy.sparse.linalg import splu

from ..errors import InvalidConfigError, InvalidInputError, SingularSystemError
from ..features.sampling import FeatureMap
from ..features.windows import LabelMap
from ..regularization import RegularizationOperator, SparseSpectrum, convolution_matrix
from ..spectral import (
    RealSpectrumBasis,
    Spectrum,
    fft2,
    from_real_spectrum,
    idft2,
    real_diagonal_operator,
    to_real_spectrum,
)
from .operators import (
    NormalEquationPattern,
    build_data_operator,
    data_rhs,
    label_spectrum,
    sample_channels,
)

LOG = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.025


@dataclass(frozen=True, eq=False)
class ModelState:
    """
    Running pair ``(A_t, b_t)`` plus the current filter.

    ``A`` is stored with both triangles in the CSR layout of ``pattern``.
    """

    A: sp.csr_matrix
    b: np.ndarray
    f_real: np.ndarray
    f_spectra: Spectrum
    gamma: float
    frame_count: int
    num_channels: int
    basis: RealSpectrumBasis
    pattern: Optional[NormalEquationPattern] = None

    @property
    def size(self) -> int:
        return self.num_channels * self.basis.size

    def with_filter(self, f_real: np.ndarray) -> "ModelState":
        f_real = np.ascontiguousarray(f_real, dtype=np.float64).reshape(self.size)
        return replace(self, f_real=f_real, f_spectra=filter_spectra(f_real, self.num_channels, self.basis))


def check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise InvalidConfigError(f"learning rate gamma must lie in [0, 1], got {gamma}")
    return gamma


def filter_spectra(f_real: np.ndarray, num_channels: int, basis: RealSpectrumBasis) -> Spectrum:
    return from_real_spectrum(np.asarray(f_real).reshape(num_channels, basis.size), basis)


def init_model(
    sample: FeatureMap | np.ndarray,
    label: LabelMap | np.ndarray,
    reg_op: RegularizationOperator,
    basis: RealSpectrumBasis,
    *,
    gamma: float = DEFAULT_GAMMA,
    pattern: Optional[NormalEquationPattern] = None,
) -> ModelState:
    """
    ``A_1 = D~^T D~ + W~^T W~`` and ``b_1 = D~^T y~``; the filter starts at zero.
    """

    gamma = check_gamma(gamma)
    channels = sample_channels(sample, basis)
    d = channels.shape[0]
    if pattern is None:
        pattern = NormalEquationPattern.build(d, basis, reg_op)
    spectra = fft2(channels)
    A = pattern.matrix(pattern.frame_values(spectra))
    b = data_rhs(spectra, label_spectrum(label, basis), basis)
    f_real = np.zeros(d * basis.size)
    return ModelState(
        A=A,
        b=b,
        f_real=f_real,
        f_spectra=filter_spectra(f_real, d, basis),
        gamma=gamma,
        frame_count=1,
        num_channels=d,
        basis=basis,
        pattern=pattern,
    )


def update_model(
    state: ModelState,
    sample: FeatureMap | np.ndarray,
    label: LabelMap | np.ndarray,
    reg_op: RegularizationOperator,
    basis: RealSpectrumBasis,
    gamma: Optional[float] = None,
) -> ModelState:
    """
    Blend in a new sample: ``A_t = (1 - g) A_{t-1} + g (D~^T D~ + W~^T W~)``,
    ``b_t = (1 - g) b_{t-1} + g D~^T y~``. Returns a new state.
    """

    gamma = check_gamma(state.gamma if gamma is None else gamma)
    if state.frame_count < 1:
        raise InvalidInputError("model must be initialized before it can be updated")
    channels = sample_channels(sample, basis)
    if channels.shape[0] != state.num_channels:
        raise InvalidInputError(f"sample has {channels.shape[0]} channels, model has {state.num_channels}")

    pattern = state.pattern
    if pattern is None:
        pattern = NormalEquationPattern.build(state.num_channels, basis, reg_op)
        if not pattern.matches(state.A):
            raise InvalidInputError("model matrix does not match the normal-equation pattern of this operator")

    spectra = fft2(channels)
    values = (1.0 - gamma) * state.A.data + gamma * pattern.frame_values(spectra)
    b = (1.0 - gamma) * state.b + gamma * data_rhs(spectra, label_spectrum(label, basis), basis)
    return replace(
        state,
        A=pattern.matrix(values),
        b=b,
        gamma=gamma,
        frame_count=state.frame_count + 1,
        pattern=pattern,
    )


def gauss_seidel_sweeps(A: sp.csr_matrix, b: np.ndarray, x0: np.ndarray, iterations: int) -> np.ndarray:
    """
    Exactly ``iterations`` forward sweeps of ``L x_j = b - U x_{j-1}``.
    """

    if iterations < 0:
        raise InvalidConfigError(f"iteration count must be non-negative, got {iterations}")
    if not (sp.isspmatrix_csr(A) and A.dtype == np.float64):
        A = sp.csr_matrix(A, dtype=np.float64)
    diagonal = A.diagonal()
    zero = np.flatnonzero(diagonal == 0.0)
    if zero.size:
        raise SingularSystemError(f"zero diagonal entry at unknown {int(zero[0])}; system is not SPD")
    x = np.array(x0, dtype=np.float64, copy=True).ravel()
    rhs = np.ascontiguousarray(b, dtype=np.float64).ravel()
    _relax_gauss_seidel(A, x, rhs, iterations=int(iterations), sweep="forward")
    return x


def gauss_seidel(state: ModelState, iterations: int) -> ModelState:
    """Warm-started sweeps on ``A f~ = b``; returns the state with the refreshed filter."""

    return state.with_filter(gauss_seidel_sweeps(state.A, state.b, state.f_real, iterations))


def solve_to_tolerance(
    A: sp.csr_matrix,
    b: np.ndarray,
    x0: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_sweeps: int = 10_000,
) -> Tuple[np.ndarray, int]:
    """
    Sweep until the relative residual drops below ``tol``. Test helper only;
    the tracker always runs a fixed sweep count.
    """

    x = np.zeros(A.shape[0]) if x0 is None else np.asarray(x0, dtype=np.float64)
    scale = float(np.linalg.norm(b)) or 1.0
    for sweep in range(1, max_sweeps + 1):
        x = gauss_seidel_sweeps(A, b, x, 1)
        if np.linalg.norm(b - A @ x) / scale < tol:
            return x, sweep
    return x, max_sweeps


def initial_solve(
    sample: FeatureMap | np.ndarray,
    label: LabelMap | np.ndarray,
    reg_op: RegularizationOperator,
    basis: RealSpectrumBasis,
) -> np.ndarray:
    """
    First-frame estimate: one sparse LU of
    ``B diag(sum_p |x_hat^p|^2) B^H + d C~^T C~`` shared by all ``d`` layers.
    """

    data = build_data_operator(sample, basis)
    spectra = data.spectra
    d = data.num_channels
    energy = np.sum(np.abs(spectra) ** 2, axis=0)
    system = (real_diagonal_operator(energy, basis) + d * reg_op.gram).tocsc()
    try:
        factor = splu(system)
    except RuntimeError as exc:
        raise SingularSystemError(f"first-frame factorization failed: {exc}") from exc

    rhs = to_real_spectrum(np.conj(spectra) * label_spectrum(label, basis)[None, :, :], basis)
    solution = factor.solve(np.ascontiguousarray(rhs.T))
    if not np.all(np.isfinite(solution)):
        raise SingularSystemError("first-frame solve produced non-finite values")
    return np.ascontiguousarray(solution.T).ravel()


def _check_loss_inputs(
    samples: Sequence[np.ndarray],
    labels: Sequence[np.ndarray],
    alphas: Optional[Sequence[float]],
) -> np.ndarray:
    if len(samples) != len(labels):
        raise InvalidInputError(f"{len(samples)} samples but {len(labels)} labels")
    if alphas is None:
        return np.ones(len(samples))
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.shape != (len(samples),):
        raise InvalidInputError("need one weight per sample")
    return alphas


def loss_spatial(
    samples: Sequence[np.ndarray],
    labels: Sequence[np.ndarray],
    filters: np.ndarray,
    w: np.ndarray,
    alphas: Optional[Sequence[float]] = None,
) -> float:
    """``sum_k a_k ||sum_l x_k^l * f^l - y_k||^2 + sum_l ||w . f^l||^2`` in the spatial domain."""

    alphas = _check_loss_inputs(samples, labels, alphas)
    filters = np.asarray(filters, dtype=np.float64)
    f_hat = fft2(filters)
    total = 0.0
    for alpha, x, y in zip(alphas, samples, labels):
        response = idft2(np.sum(fft2(np.asarray(x)) * f_hat, axis=0))
        total += alpha * float(np.sum((response - y) ** 2))
    return total + float(np.sum((np.asarray(w)[None] * filters) ** 2))


def loss_fourier(
    samples: Sequence[np.ndarray],
    labels: Sequence[np.ndarray],
    filter_hat: np.ndarray,
    w_hat: SparseSpectrum,
    alphas: Optional[Sequence[float]] = None,
) -> float:
    """Same loss from DFT coefficients; equals ``MN`` times :func:`loss_spatial`."""

    alphas = _check_loss_inputs(samples, labels, alphas)
    filter_hat = np.asarray(filter_hat)
    total = 0.0
    for alpha, x, y in zip(alphas, samples, labels):
        residual = np.sum(fft2(np.asarray(x)) * filter_hat, axis=0) - fft2(np.asarray(y))
        total += alpha * float(np.sum(np.abs(residual) ** 2))
    conv = convolution_matrix(w_hat)
    size = w_hat.domain.size
    for layer in filter_hat.reshape(filter_hat.shape[0], size):
        total += float(np.sum(np.abs(conv @ layer / size) ** 2))
    return total


def loss_real(
    samples: Sequence[np.ndarray],
    labels: Sequence[np.ndarray],
    f_real: np.ndarray,
    reg_op: RegularizationOperator,
    basis: RealSpectrumBasis,
    alphas: Optional[Sequence[float]] = None,
) -> float:
    """Vectorized real form ``sum_k a_k ||D~_k f~ - y~_k||^2 + ||W~ f~||^2``."""

    alphas = _check_loss_inputs(samples, labels, alphas)
    f_real = np.asarray(f_real, dtype=np.float64)
    total = 0.0
    for alpha, x, y in zip(alphas, samples, labels):
        data = build_data_operator(x, basis)
        residual = data.apply(f_real) - to_real_spectrum(label_spectrum(y, basis), basis)
        total += alpha * float(residual @ residual)
    layers = f_real.reshape(-1, basis.size)
    return total + float(sum(np.sum((reg_op.real_conv_matrix @ layer) ** 2) for layer in layers))


__all__ = [
    "DEFAULT_GAMMA",
    "ModelState",
    "check_gamma",
    "filter_spectra",
    "gauss_seidel",
    "gauss_seidel_sweeps",
    "init_model",
    "initial_solve",
    "loss_fourier",
    "loss_real",
    "loss_spatial",
    "solve_to_tolerance",
    "update_model",
]
