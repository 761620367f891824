"""
Spectral core: DFT helpers, the point-reflection partition and the real
transform ``B`` every other module builds on.
"""

from __future__ import annotations

from .basis import (
    RealSpectrumBasis,
    from_real_spectrum,
    pair_pattern,
    pair_values,
    partition_domain,
    real_diagonal_operator,
    to_real_spectrum,
)
from .dft import GridDomain, Spectrum, circular_convolve, dft2, fft2, idft2, ifft2, reflect

__all__ = [
    "GridDomain",
    "RealSpectrumBasis",
    "Spectrum",
    "circular_convolve",
    "dft2",
    "fft2",
    "from_real_spectrum",
    "idft2",
    "ifft2",
    "pair_pattern",
    "pair_values",
    "partition_domain",
    "real_diagonal_operator",
    "reflect",
    "to_real_spectrum",
]
