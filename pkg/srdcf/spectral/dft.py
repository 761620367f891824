"""
2D DFT machinery on the feature grid.

Normalization lives here and only here: the forward transform is unnormalized
and the inverse carries the ``1/(MN)`` factor, so ``idft2(dft2(x)) == x``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.fft

from ..errors import InvalidInputError

LOG = logging.getLogger(__name__)

# scipy.fft "backward": forward unscaled, inverse scaled by 1/n.
FFT_NORM = "backward"
HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True, slots=True)
class GridDomain:
    """
    The ``M x N`` index set shared by samples, filters, labels and weights.
    """

    M: int
    N: int

    def __post_init__(self) -> None:
        if int(self.M) < 1 or int(self.N) < 1:
            raise InvalidInputError(f"grid must be at least 1x1, got {self.M}x{self.N}")

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.M), int(self.N))

    @property
    def size(self) -> int:
        return int(self.M) * int(self.N)

    @property
    def center(self) -> Tuple[int, int]:
        """Sample-center cell; index ``(M//2, N//2)``."""

        return (int(self.M) // 2, int(self.N) // 2)

    @classmethod
    def of(cls, array: np.ndarray) -> "GridDomain":
        if array.ndim < 2:
            raise InvalidInputError(f"expected a 2D map, got shape {array.shape}")
        return cls(M=int(array.shape[-2]), N=int(array.shape[-1]))

    def check(self, array: np.ndarray, what: str = "map") -> None:
        if array.ndim < 2 or tuple(array.shape[-2:]) != self.shape:
            raise InvalidInputError(
                f"{what} has shape {tuple(array.shape)}, expected trailing {self.shape}"
            )


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    DFT coefficients over a :class:`GridDomain`.

    ``values`` may carry leading axes (e.g. one spectrum per feature channel).
    """

    values: np.ndarray
    domain: GridDomain

    def hermitian_error(self) -> float:
        """Largest ``|v(p) - conj(v(rho(p)))|`` relative to the largest magnitude."""

        return hermitian_error(self.values)

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        return self.hermitian_error() <= rtol


def reflect(values: np.ndarray) -> np.ndarray:
    """
    Apply the point reflection ``rho(m, n) = (-m mod M, -n mod N)`` to the last two axes.
    """

    flipped = np.flip(values, axis=(-2, -1))
    return np.roll(flipped, shift=(1, 1), axis=(-2, -1))


def hermitian_error(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        return 0.0
    residue = np.max(np.abs(values - np.conj(reflect(values))))
    return float(residue) / scale


def fft2(array: np.ndarray) -> np.ndarray:
    """Forward DFT over the last two axes (raw arrays, any leading shape)."""

    return scipy.fft.fft2(array, axes=(-2, -1), norm=FFT_NORM)


def ifft2(array: np.ndarray) -> np.ndarray:
    """Inverse DFT over the last two axes, carrying the ``1/(MN)`` factor."""

    return scipy.fft.ifft2(array, axes=(-2, -1), norm=FFT_NORM)


def dft2(values: np.ndarray) -> Spectrum:
    """
    Forward unnormalized DFT of a real ``M x N`` map (leading axes allowed).
    """

    array = np.asarray(values)
    if array.ndim < 2:
        raise InvalidInputError(f"dft2 expects a 2D map, got shape {array.shape}")
    if np.iscomplexobj(array):
        raise InvalidInputError("dft2 expects a real-valued map")
    domain = GridDomain.of(array)
    return Spectrum(values=fft2(array.astype(np.float64, copy=False)), domain=domain)


def idft2(spectrum: Spectrum | np.ndarray) -> np.ndarray:
    """
    Inverse DFT returning the real part; the imaginary residue of a Hermitian
    spectrum is round-off and is discarded.
    """

    values = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    spatial = ifft2(values)
    if LOG.isEnabledFor(logging.DEBUG) and spatial.size:
        scale = float(np.max(np.abs(spatial))) or 1.0
        residue = float(np.max(np.abs(spatial.imag))) / scale
        if residue > 1e-8:
            LOG.debug("idft2 discarding imaginary residue %.3e", residue)
    return np.ascontiguousarray(spatial.real)


def circular_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Direct ``O(M^2 N^2)`` circular convolution of two maps of equal shape.

    Reference implementation for checking the FFT path on small grids.
    """

    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 2:
        raise InvalidInputError(f"circular_convolve needs equal 2D shapes, got {x.shape} and {y.shape}")
    M, N = x.shape
    out = np.zeros(np.broadcast(x, y).shape, dtype=np.result_type(x, y))
    for j in range(M):
        for k in range(N):
            if x[j, k] != 0:
                out = out + x[j, k] * np.roll(y, shift=(j, k), axis=(0, 1))
    return out


__all__ = [
    "FFT_NORM",
    "GridDomain",
    "Spectrum",
    "circular_convolve",
    "dft2",
    "fft2",
    "hermitian_error",
    "idft2",
    "ifft2",
    "reflect",
]
