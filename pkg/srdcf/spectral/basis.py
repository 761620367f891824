"""
Real-valued reparametrisation of Hermitian spectra.

The point reflection ``rho`` pairs every frequency with its conjugate partner.
Fixed points form ``omega0``; of every other pair the row-major smaller index
goes to ``omega_plus`` and its reflection to ``omega_minus``. The unitary map
``B`` sends a Hermitian spectrum to a real vector:

* ``omega0``:  ``f(p)``
* ``omega_plus``:  ``(f(p) + f(rho(p))) / sqrt(2)``
* ``omega_minus``: ``(f(p) - f(rho(p))) / (i sqrt(2))``

Vectors are flattened row-major, index ``m * N + n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..debug import debug_enabled
from ..errors import InvalidInputError, SymmetryViolationError
from .dft import HERMITIAN_RTOL, GridDomain, Spectrum, hermitian_error

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class RealSpectrumBasis:
    domain: GridDomain
    omega0: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    _matrix: Optional[sp.csr_matrix] = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.domain.size

    def reflection(self) -> np.ndarray:
        """Flat index of ``rho(k)`` for every flat index ``k``."""

        return reflection_indices(self.domain)

    def matrix(self) -> sp.csr_matrix:
        """``B`` as a complex sparse matrix (at most two non-zeros per row)."""

        if self._matrix is not None:
            return self._matrix
        o0, op, om = self.omega0, self.omega_plus, self.omega_minus
        inv = 1.0 / SQRT2
        rows = np.concatenate([o0, op, op, om, om])
        cols = np.concatenate([o0, op, om, om, op])
        vals = np.concatenate(
            [
                np.ones(o0.size, dtype=np.complex128),
                np.full(op.size, inv, dtype=np.complex128),
                np.full(op.size, inv, dtype=np.complex128),
                np.full(om.size, 1.0 / (1j * SQRT2), dtype=np.complex128),
                np.full(om.size, -1.0 / (1j * SQRT2), dtype=np.complex128),
            ]
        )
        n = self.size
        matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        object.__setattr__(self, "_matrix", matrix)
        return matrix


def reflection_indices(domain: GridDomain) -> np.ndarray:
    M, N = domain.shape
    m, n = np.divmod(np.arange(domain.size), N)
    return ((-m) % M) * N + ((-n) % N)


def partition_domain(domain: GridDomain) -> RealSpectrumBasis:
    """
    Split ``Omega`` into ``omega0``, ``omega_plus`` and ``omega_minus``.

    Fixed points satisfy ``2m = 0 (mod M)`` and ``2n = 0 (mod N)``, which covers
    odd and even sizes alike.
    """

    index = np.arange(domain.size)
    partner = reflection_indices(domain)
    omega0 = index[partner == index]
    plus_mask = index < partner
    omega_plus = index[plus_mask]
    omega_minus = partner[plus_mask]
    return RealSpectrumBasis(
        domain=domain,
        omega0=omega0,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
    )


def _flatten(values: np.ndarray, domain: GridDomain) -> np.ndarray:
    domain.check(values, "spectrum")
    return values.reshape(values.shape[:-2] + (domain.size,))


def to_real_spectrum(spectrum: Spectrum | np.ndarray, basis: RealSpectrumBasis) -> np.ndarray:
    """
    Apply ``B`` to a Hermitian spectrum; returns real ``(..., M*N)`` vectors.
    """

    values = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    if debug_enabled():
        error = hermitian_error(values)
        if error > HERMITIAN_RTOL:
            raise SymmetryViolationError(f"spectrum is not Hermitian (relative error {error:.3e})")
    flat = _flatten(values, basis.domain)
    o0, op, om = basis.omega0, basis.omega_plus, basis.omega_minus
    out = np.empty(flat.shape, dtype=np.float64)
    out[..., o0] = flat[..., o0].real
    out[..., op] = ((flat[..., op] + flat[..., om]) / SQRT2).real
    out[..., om] = ((flat[..., om] - flat[..., op]) / (1j * SQRT2)).real
    return out


def from_real_spectrum(vector: np.ndarray, basis: RealSpectrumBasis) -> Spectrum:
    """
    Apply ``B^H``: real ``(..., M*N)`` vectors back to Hermitian spectra.
    """

    flat = np.asarray(vector, dtype=np.float64)
    if flat.shape[-1:] != (basis.size,):
        raise InvalidInputError(
            f"real spectrum has trailing size {flat.shape[-1:]}, expected {basis.size}"
        )
    o0, op, om = basis.omega0, basis.omega_plus, basis.omega_minus
    out = np.empty(flat.shape, dtype=np.complex128)
    out[..., o0] = flat[..., o0]
    out[..., op] = (flat[..., op] - 1j * flat[..., om]) / SQRT2
    out[..., om] = (flat[..., op] + 1j * flat[..., om]) / SQRT2
    values = out.reshape(flat.shape[:-1] + basis.domain.shape)
    return Spectrum(values=values, domain=basis.domain)


def pair_pattern(basis: RealSpectrumBasis) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row/column indices of ``B diag(g) B^H`` for Hermitian ``g``.

    Ordering matches :func:`pair_values`.
    """

    o0, op, om = basis.omega0, basis.omega_plus, basis.omega_minus
    rows = np.concatenate([o0, op, op, om, om])
    cols = np.concatenate([o0, op, om, op, om])
    return rows, cols


def pair_values(g: np.ndarray, basis: RealSpectrumBasis) -> np.ndarray:
    """
    Non-zero values of ``B diag(g) B^H`` in :func:`pair_pattern` order.

    Each ``(omega_plus, omega_minus)`` pair is the real 2x2 block
    ``[[Re g, Im g], [-Im g, Re g]]`` taken at the ``omega_plus`` index.
    """

    flat = _flatten(np.asarray(g), basis.domain)
    o0, op = basis.omega0, basis.omega_plus
    gp = flat[..., op]
    return np.concatenate(
        [flat[..., o0].real, gp.real, gp.imag, -gp.imag, gp.real], axis=-1
    )


def real_diagonal_operator(g: np.ndarray, basis: RealSpectrumBasis) -> sp.csr_matrix:
    """``B diag(g) B^H`` as a real sparse matrix (at most two non-zeros per row)."""

    rows, cols = pair_pattern(basis)
    vals = pair_values(g, basis)
    n = basis.size
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


__all__ = [
    "RealSpectrumBasis",
    "from_real_spectrum",
    "pair_pattern",
    "pair_values",
    "partition_domain",
    "real_diagonal_operator",
    "reflection_indices",
    "to_real_spectrum",
]
