"""
Versioned little-endian binary snapshots of :class:`ModelState`.

Layout::

    b"SRDC"  u32 version  u32 d  u32 M  u32 N  f64 gamma  u32 frame_count
    f64[dMN] b  u64 nnz  i64[dMN+1] indptr  i32[nnz] indices  f64[nnz] data
    f64[dMN] f_real
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp

from ..errors import SnapshotError
from ..spectral import GridDomain, RealSpectrumBasis, partition_domain
from .model import ModelState, filter_spectra
from .operators import NormalEquationPattern

LOG = logging.getLogger(__name__)

MAGIC = b"SRDC"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIdI")
_NNZ = struct.Struct("<Q")


def save_snapshot(state: ModelState, path: str | Path) -> Path:
    path = Path(path)
    M, N = state.basis.domain.shape
    A = state.A.tocsr()
    A.sort_indices()
    chunks = [
        _HEADER.pack(MAGIC, VERSION, state.num_channels, M, N, float(state.gamma), int(state.frame_count)),
        np.asarray(state.b, dtype="<f8").tobytes(),
        _NNZ.pack(int(A.nnz)),
        np.asarray(A.indptr, dtype="<i8").tobytes(),
        np.asarray(A.indices, dtype="<i4").tobytes(),
        np.asarray(A.data, dtype="<f8").tobytes(),
        np.asarray(state.f_real, dtype="<f8").tobytes(),
    ]
    path.write_bytes(b"".join(chunks))
    LOG.debug("Wrote model snapshot %s (nnz=%d, frame %d).", path, A.nnz, state.frame_count)
    return path


class _Reader:
    def __init__(self, payload: bytes) -> None:
        self.payload = payload
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.payload):
            raise SnapshotError(f"snapshot truncated while reading {what}")
        chunk = self.payload[self.offset : end]
        self.offset = end
        return chunk

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count, what), dtype=dtype).copy()


def load_snapshot(
    path: str | Path,
    basis: Optional[RealSpectrumBasis] = None,
    pattern: Optional[NormalEquationPattern] = None,
) -> ModelState:
    """
    Read a snapshot. ``pattern`` (when given) must describe the stored matrix
    layout; it is attached so the state can keep receiving updates.
    """

    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc

    reader = _Reader(payload)
    magic, version, d, M, N, gamma, frame_count = _HEADER.unpack(reader.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise SnapshotError(f"{path} is not a model snapshot (magic {magic!r})")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}; expected {VERSION}")
    if d < 1 or M < 1 or N < 1:
        raise SnapshotError(f"snapshot has invalid dimensions d={d} M={M} N={N}")

    size = d * M * N
    b = reader.array("<f8", size, "b")
    (nnz,) = _NNZ.unpack(reader.take(_NNZ.size, "nnz"))
    indptr = reader.array("<i8", size + 1, "indptr")
    indices = reader.array("<i4", nnz, "indices")
    data = reader.array("<f8", nnz, "data")
    f_real = reader.array("<f8", size, "f_real")
    if reader.offset != len(payload):
        raise SnapshotError(f"snapshot has {len(payload) - reader.offset} trailing bytes")
    if indptr[0] != 0 or indptr[-1] != nnz or np.any(np.diff(indptr) < 0):
        raise SnapshotError("snapshot row pointers are inconsistent")
    if nnz and (indices.min() < 0 or indices.max() >= size):
        raise SnapshotError("snapshot column indices out of range")

    domain = GridDomain(M=M, N=N)
    if basis is None:
        basis = partition_domain(domain)
    elif basis.domain != domain:
        raise SnapshotError(f"snapshot grid {M}x{N} does not match basis {basis.domain}")

    A = sp.csr_matrix((data, indices, indptr), shape=(size, size))
    if pattern is not None:
        if not pattern.matches(A):
            raise SnapshotError("snapshot matrix layout does not match the supplied pattern")
        A = pattern.matrix(data)

    return ModelState(
        A=A,
        b=b,
        f_real=f_real,
        f_spectra=filter_spectra(f_real, d, basis),
        gamma=float(gamma),
        frame_count=int(frame_count),
        num_channels=int(d),
        basis=basis,
        pattern=pattern,
    )


__all__ = ["MAGIC", "VERSION", "load_snapshot", "save_snapshot"]
