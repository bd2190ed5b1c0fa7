"""GVLC snapshot files.

Layout (little endian)::

    b"GVLC" | u32 version=1 | u32 dim | u32 n | u32 components | u64 count
    count x (f64 re, f64 im)

Values are frequency-major: the integer multi-index ``k`` runs row-major
over ``[-n/2, n/2)^dim`` in ascending order, and the component index varies
fastest.  ``count == n**dim * components``.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .fourier_grid import GridSpec, SpectralField

MAGIC = b"GVLC"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIQ")


class SnapshotFormatError(ValueError):
    pass


def _axes(dim: int) -> tuple[int, ...]:
    return tuple(range(1, dim + 1))


def encode_snapshot(f: SpectralField) -> bytes:
    spec = f.spec
    ordered = np.fft.fftshift(f.coeffs, axes=_axes(spec.dim))
    # component axis last -> frequency-major, component-minor
    values = np.moveaxis(ordered, 0, -1).astype("<c16", copy=False)
    header = _HEADER.pack(MAGIC, VERSION, spec.dim, spec.n, f.components, values.size)
    return header + np.ascontiguousarray(values).tobytes()


def decode_snapshot(data: bytes, box_length: float = 2.0 * np.pi) -> SpectralField:
    if len(data) < _HEADER.size:
        raise SnapshotFormatError("file shorter than GVLC header")
    magic, version, dim, n, comps, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported GVLC version {version}")
    try:
        spec = GridSpec(dim, n, box_length)
    except ValueError as exc:
        raise SnapshotFormatError(str(exc)) from exc
    if comps < 1 or count != n**dim * comps:
        raise SnapshotFormatError(f"count {count} inconsistent with dim={dim} n={n} components={comps}")
    body = data[_HEADER.size :]
    if len(body) != 16 * count:
        raise SnapshotFormatError(f"expected {16 * count} payload bytes, found {len(body)}")
    values = np.frombuffer(body, dtype="<c16").reshape(spec.shape + (comps,))
    coeffs = np.fft.ifftshift(np.moveaxis(values, -1, 0), axes=_axes(dim)).astype(complex)
    return SpectralField(spec, coeffs, real=_is_hermitian(coeffs, dim))


def _is_hermitian(coeffs: np.ndarray, dim: int) -> bool:
    axes = _axes(dim)
    flipped = np.roll(np.flip(coeffs, axis=axes), 1, axis=axes)
    return bool(np.allclose(flipped, coeffs.conj(), rtol=0, atol=1e-12 * (1 + np.abs(coeffs).max(initial=0))))


def write_snapshot(path: str | Path, f: SpectralField) -> None:
    Path(path).write_bytes(encode_snapshot(f))


def read_snapshot(path: str | Path, box_length: float = 2.0 * np.pi) -> SpectralField:
    return decode_snapshot(Path(path).read_bytes(), box_length)
