"""
Spatial regularization: the penalty map ``w``, its sparse spectrum and the
real-valued convolution operator the solver uses.

``build_weights`` returns the map in sample coordinates (minimum on the
sample-center cell). The solver penalizes filter coefficients, and under the
convolution response the coefficients matching a centred target sit around the
filter origin, so the spectrum handed to :func:`build_operator` is that of the
map circularly shifted to put its minimum on index ``(0, 0)``. The shift only
changes the phase of ``w_hat``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from .debug import debug_enabled
from .errors import InvalidInputError, SingularSystemError, SymmetryViolationError
from .features.windows import centered_offsets
from .spectral import GridDomain, RealSpectrumBasis, fft2, idft2
from .spectral.basis import reflection_indices
from .spectral.dft import hermitian_error

LOG = logging.getLogger(__name__)

DEFAULT_MU = 0.1
DEFAULT_ETA = 3.0
DEFAULT_TARGET_NNZ = 10
ZERO_RTOL = 1e-12
SPD_CHECK_MAX_SIZE = 400


@dataclass(frozen=True, eq=False)
class SparseSpectrum:
    """Retained DFT coefficients: flat indices (row-major) and complex values."""

    domain: GridDomain
    indices: np.ndarray
    coefficients: np.ndarray

    @property
    def K(self) -> int:
        return int(self.indices.size)

    def dense(self) -> np.ndarray:
        values = np.zeros(self.domain.size, dtype=np.complex128)
        values[self.indices] = self.coefficients
        return values.reshape(self.domain.shape)

    def spatial(self) -> np.ndarray:
        return idft2(self.dense())

    @classmethod
    def from_dense(cls, values: np.ndarray) -> "SparseSpectrum":
        domain = GridDomain.of(values)
        flat = np.asarray(values, dtype=np.complex128).ravel()
        scale = float(np.max(np.abs(flat))) if flat.size else 0.0
        keep = np.flatnonzero(np.abs(flat) > ZERO_RTOL * scale) if scale > 0 else np.array([0])
        if 0 not in keep:
            keep = np.union1d(keep, [0])
        return cls(domain=domain, indices=keep, coefficients=flat[keep])


@dataclass(frozen=True, eq=False)
class SpatialWeights:
    """
    Penalty actually seen by the solver.

    ``spatial`` is the inverse DFT of ``sparse_spectrum`` moved back to sample
    coordinates; ``sparse_spectrum`` is expressed in the filter (origin) frame.
    """

    mu: float
    eta: float
    target_size_cells: Tuple[float, float]
    domain: GridDomain
    spatial: np.ndarray
    sparse_spectrum: SparseSpectrum

    @property
    def K(self) -> int:
        return self.sparse_spectrum.K


@dataclass(frozen=True, eq=False)
class RegularizationOperator:
    """``C~ = B circ(w_hat) B^H / (MN)`` and its Gram ``C~^T C~``."""

    real_conv_matrix: sp.csr_matrix
    gram: sp.csr_matrix
    K: int


def build_weights(
    domain: GridDomain,
    target_size_cells: Tuple[float, float],
    mu: float = DEFAULT_MU,
    eta: float = DEFAULT_ETA,
) -> np.ndarray:
    """
    ``w(m, n) = mu + eta (dm / P)^2 + eta (dn / Q)^2`` around the sample-center cell.
    """

    p, q = float(target_size_cells[0]), float(target_size_cells[1])
    if p < 1 or q < 1:
        raise InvalidInputError(f"target size in cells must be >= 1, got {target_size_cells}")
    if not mu > 0 or eta < 0:
        raise InvalidInputError(f"need mu > 0 and eta >= 0, got mu={mu} eta={eta}")
    cm, cn = domain.center
    dm = centered_offsets(domain.M, cm).astype(np.float64)
    dn = centered_offsets(domain.N, cn).astype(np.float64)
    return mu + eta * (dm[:, None] / p) ** 2 + eta * (dn[None, :] / q) ** 2


def sparsify_spectrum(w: np.ndarray, target_nnz: int = DEFAULT_TARGET_NNZ) -> SparseSpectrum:
    """
    Keep the largest DFT coefficients of ``w`` (DC always, conjugate pairs
    together) until adding the next pair would exceed ``target_nnz``.
    """

    w = np.asarray(w, dtype=np.float64)
    domain = GridDomain.of(w)
    spectrum = fft2(w).ravel()
    magnitude = np.abs(spectrum)
    scale = float(magnitude.max()) if magnitude.size else 0.0
    partner = reflection_indices(domain)

    # One representative per {p, rho(p)} class, ranked by magnitude then index.
    index = np.arange(domain.size)
    representative = index[index <= partner]
    representative = representative[representative != 0]
    order = np.lexsort((representative, -magnitude[representative]))

    kept = [0]
    for rep in representative[order]:
        if magnitude[rep] <= ZERO_RTOL * scale:
            break
        members = [int(rep)] if partner[rep] == rep else [int(rep), int(partner[rep])]
        if len(kept) + len(members) > target_nnz:
            break
        kept.extend(members)

    indices = np.sort(np.asarray(kept, dtype=np.int64))
    return SparseSpectrum(domain=domain, indices=indices, coefficients=spectrum[indices])


def restore_minimum(sparse: SparseSpectrum, minimum: float) -> SparseSpectrum:
    """
    Shift the DC coefficient so the truncated map's minimum equals ``minimum``.
    """

    spatial = sparse.spatial()
    offset = (minimum - float(spatial.min())) * sparse.domain.size
    coefficients = sparse.coefficients.copy()
    coefficients[np.flatnonzero(sparse.indices == 0)] += offset
    return SparseSpectrum(domain=sparse.domain, indices=sparse.indices, coefficients=coefficients)


def build_spatial_weights(
    domain: GridDomain,
    target_size_cells: Tuple[float, float],
    mu: float = DEFAULT_MU,
    eta: float = DEFAULT_ETA,
    target_nnz: int = DEFAULT_TARGET_NNZ,
) -> SpatialWeights:
    centred = build_weights(domain, target_size_cells, mu=mu, eta=eta)
    origin = np.fft.ifftshift(centred)
    sparse = restore_minimum(sparsify_spectrum(origin, target_nnz), mu)
    LOG.debug("Spatial weights on %dx%d grid keep K=%d coefficients.", domain.M, domain.N, sparse.K)
    return SpatialWeights(
        mu=float(mu),
        eta=float(eta),
        target_size_cells=(float(target_size_cells[0]), float(target_size_cells[1])),
        domain=domain,
        spatial=np.fft.fftshift(sparse.spatial()),
        sparse_spectrum=sparse,
    )


def uniform_weights(domain: GridDomain, lam: float) -> SpatialWeights:
    """Constant ``w = sqrt(lam)``: the standard DCF regularizer ``lam * ||f||^2``."""

    if not lam > 0:
        raise InvalidInputError(f"uniform lambda must be positive, got {lam}")
    root = float(np.sqrt(lam))
    sparse = SparseSpectrum(
        domain=domain,
        indices=np.array([0], dtype=np.int64),
        coefficients=np.array([domain.size * root], dtype=np.complex128),
    )
    return SpatialWeights(
        mu=root,
        eta=0.0,
        target_size_cells=(0.0, 0.0),
        domain=domain,
        spatial=np.full(domain.shape, root),
        sparse_spectrum=sparse,
    )


def convolution_matrix(sparse: SparseSpectrum) -> sp.csr_matrix:
    """``circ(w_hat)``: row ``k`` holds ``w_hat(j)`` at column ``k - j`` (mod grid)."""

    domain = sparse.domain
    M, N = domain.shape
    km, kn = np.divmod(np.arange(domain.size), N)
    jm, jn = np.divmod(sparse.indices, N)
    rows = np.repeat(np.arange(domain.size), sparse.K)
    cols = (((km[:, None] - jm[None, :]) % M) * N + (kn[:, None] - jn[None, :]) % N).ravel()
    vals = np.tile(sparse.coefficients, domain.size)
    return sp.csr_matrix((vals, (rows, cols)), shape=(domain.size, domain.size))


def _drop_small(matrix: sp.csr_matrix, rtol: float = 1e-14) -> sp.csr_matrix:
    if matrix.nnz:
        scale = float(np.max(np.abs(matrix.data)))
        matrix.data[np.abs(matrix.data) <= rtol * scale] = 0.0
        matrix.eliminate_zeros()
    return matrix


def build_operator(
    sparse: SparseSpectrum,
    basis: RealSpectrumBasis,
    jitter: float = 0.0,
) -> RegularizationOperator:
    """
    Real convolution operator ``C~`` and Gram ``C~^T C~`` (+ ``jitter * I``).
    """

    if sparse.domain != basis.domain:
        raise InvalidInputError(f"spectrum domain {sparse.domain} does not match basis {basis.domain}")
    dense = sparse.dense()
    error = hermitian_error(dense)
    if error > 1e-10:
        raise SymmetryViolationError(f"weight spectrum is not Hermitian (relative error {error:.3e})")

    B = basis.matrix()
    product = (B @ convolution_matrix(sparse) @ B.conj().T).tocsr() / basis.size
    scale = float(np.max(np.abs(product.data))) if product.nnz else 0.0
    residue = float(np.max(np.abs(product.data.imag))) if product.nnz else 0.0
    if scale and residue > 1e-10 * scale:
        raise SymmetryViolationError(f"real convolution operator has imaginary residue {residue:.3e}")
    real_conv = _drop_small(sp.csr_matrix(product.real))
    real_conv.sort_indices()

    gram = (real_conv.T @ real_conv).tocsr()
    gram = (0.5 * (gram + gram.T)).tocsr()
    if jitter:
        gram = (gram + jitter * sp.identity(basis.size, format="csr")).tocsr()
    gram = _drop_small(gram)
    gram.sort_indices()

    if debug_enabled() and basis.size <= SPD_CHECK_MAX_SIZE:
        try:
            np.linalg.cholesky(gram.toarray())
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("regularization Gram is not positive definite") from exc

    return RegularizationOperator(real_conv_matrix=real_conv, gram=gram, K=sparse.K)


__all__ = [
    "DEFAULT_ETA",
    "DEFAULT_MU",
    "DEFAULT_TARGET_NNZ",
    "RegularizationOperator",
    "SparseSpectrum",
    "SpatialWeights",
    "build_operator",
    "build_spatial_weights",
    "build_weights",
    "convolution_matrix",
    "restore_minimum",
    "sparsify_spectrum",
    "uniform_weights",
]
