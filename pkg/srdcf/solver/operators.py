"""
Real-valued data operators and the fixed sparsity pattern of the normal equations.

Unknowns are ordered layer-major: entry ``l * MN + p`` is frequency ``p`` of
filter layer ``l`` in the real basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidInputError
from ..features.sampling import FeatureMap
from ..features.windows import LabelMap
from ..regularization import RegularizationOperator
from ..spectral import RealSpectrumBasis, fft2, pair_pattern, pair_values, real_diagonal_operator, to_real_spectrum

LOG = logging.getLogger(__name__)


def sample_channels(sample: FeatureMap | np.ndarray, basis: RealSpectrumBasis) -> np.ndarray:
    channels = sample.channels if isinstance(sample, FeatureMap) else np.asarray(sample, dtype=np.float64)
    if channels.ndim == 2:
        channels = channels[None, :, :]
    if channels.ndim != 3:
        raise InvalidInputError(f"sample must be (d, M, N), got {channels.shape}")
    basis.domain.check(channels, "sample")
    return channels


def label_spectrum(label: LabelMap | np.ndarray, basis: RealSpectrumBasis) -> np.ndarray:
    values = label.values if isinstance(label, LabelMap) else np.asarray(label, dtype=np.float64)
    if values.ndim != 2:
        raise InvalidInputError(f"label must be a 2D map, got {values.shape}")
    basis.domain.check(values, "label")
    return fft2(values)


@dataclass(frozen=True, eq=False)
class DataOperator:
    """
    ``D~ = [D~^1 ... D~^d]`` with ``D~^l = B diag(x_hat^l) B^H``.
    """

    spectra: np.ndarray
    blocks: Tuple[sp.csr_matrix, ...]
    basis: RealSpectrumBasis

    @property
    def num_channels(self) -> int:
        return len(self.blocks)

    def matrix(self) -> sp.csr_matrix:
        return sp.hstack(self.blocks, format="csr")

    def apply(self, f_real: np.ndarray) -> np.ndarray:
        layers = np.asarray(f_real, dtype=np.float64).reshape(self.num_channels, self.basis.size)
        out = np.zeros(self.basis.size)
        for block, layer in zip(self.blocks, layers):
            out += block @ layer
        return out

    def transpose_apply(self, residual: np.ndarray) -> np.ndarray:
        return np.concatenate([block.T @ residual for block in self.blocks])


def build_data_operator(sample: FeatureMap | np.ndarray, basis: RealSpectrumBasis) -> DataOperator:
    channels = sample_channels(sample, basis)
    spectra = fft2(channels)
    blocks = tuple(real_diagonal_operator(spectrum, basis) for spectrum in spectra)
    return DataOperator(spectra=spectra, blocks=blocks, basis=basis)


def data_rhs(spectra: np.ndarray, label_hat: np.ndarray, basis: RealSpectrumBasis) -> np.ndarray:
    """``D~^T y~``: layer ``l`` is ``B (conj(x_hat^l) y_hat)``."""

    return to_real_spectrum(np.conj(spectra) * label_hat[None, :, :], basis).ravel()


@dataclass(frozen=True, eq=False)
class NormalEquationPattern:
    """
    Union sparsity pattern of ``D~^T D~ + W~^T W~`` for every possible sample.

    Built once per tracker; per-frame assembly only fills a value array laid
    out in CSR order (row-major, sorted columns).
    """

    num_channels: int
    basis: RealSpectrumBasis
    indptr: np.ndarray
    indices: np.ndarray
    data_slots: np.ndarray
    reg_values: np.ndarray

    @classmethod
    def build(cls, num_channels: int, basis: RealSpectrumBasis, reg_op: RegularizationOperator) -> "NormalEquationPattern":
        if num_channels < 1:
            raise InvalidInputError(f"need at least one channel, got {num_channels}")
        d, mn = int(num_channels), basis.size
        n = d * mn

        pair_rows, pair_cols = pair_pattern(basis)
        layer = np.arange(d, dtype=np.int64)
        data_rows = layer[:, None, None] * mn + pair_rows[None, None, :]
        data_cols = layer[None, :, None] * mn + pair_cols[None, None, :]
        data_keys = (data_rows * n + data_cols).ravel()

        gram = reg_op.gram.tocoo()
        reg_rows = (layer[:, None] * mn + gram.row[None, :]).ravel()
        reg_cols = (layer[:, None] * mn + gram.col[None, :]).ravel()
        reg_keys = reg_rows.astype(np.int64) * n + reg_cols

        keys = np.union1d(data_keys, reg_keys)
        data_slots = np.searchsorted(keys, data_keys)
        reg_values = np.zeros(keys.size)
        reg_values[np.searchsorted(keys, reg_keys)] = np.tile(gram.data, d)

        rows = keys // n
        index_dtype = np.int32 if keys.size < np.iinfo(np.int32).max else np.int64
        indptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=n))]).astype(index_dtype)
        indices = (keys % n).astype(index_dtype)
        LOG.debug("Normal-equation pattern: n=%d nnz=%d (fraction %.4g).", n, keys.size, keys.size / float(n) ** 2)
        return cls(
            num_channels=d,
            basis=basis,
            indptr=indptr,
            indices=indices,
            data_slots=data_slots,
            reg_values=reg_values,
        )

    @property
    def size(self) -> int:
        return self.num_channels * self.basis.size

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def frame_values(self, spectra: np.ndarray) -> np.ndarray:
        """CSR values of ``D~^T D~ + W~^T W~`` for one sample spectrum ``(d, M, N)``."""

        if spectra.shape[0] != self.num_channels:
            raise InvalidInputError(f"sample has {spectra.shape[0]} channels, model has {self.num_channels}")
        cross = np.conj(spectra)[:, None] * spectra[None, :]
        values = self.reg_values.copy()
        values[self.data_slots] += pair_values(cross, self.basis).ravel()
        return values

    def matrix(self, values: np.ndarray) -> sp.csr_matrix:
        return sp.csr_matrix((values, self.indices, self.indptr), shape=(self.size, self.size))

    def matches(self, matrix: sp.csr_matrix) -> bool:
        return (
            matrix.shape == (self.size, self.size)
            and np.array_equal(matrix.indptr, self.indptr)
            and np.array_equal(matrix.indices, self.indices)
        )


__all__ = [
    "DataOperator",
    "NormalEquationPattern",
    "build_data_operator",
    "data_rhs",
    "label_spectrum",
    "sample_channels",
]
