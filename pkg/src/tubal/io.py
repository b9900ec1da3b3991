"""Bit-exact binary containers for tensors, masks, and transform matrices.

Tensor files start with the magic ``TNS1``, one flags byte (bit 0: complex
payload, bit 1: real hint), three little-endian u64 dims, then the payload
as little-endian f64 values in column-major order with slices consecutive,
interleaved (re, im) when complex. Mask files start with ``MSK1``, the same
dims, a u64 count, and that many (i, j, k) u64 triples sorted strictly
lexicographically. A transform matrix rides in a tensor file of dims
(N3, n3, 1). Writing then reading reproduces every value bit for bit; any
header or payload corruption is rejected with the byte offset in the message.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError
from .solver import SamplingMask
from .tensor import Tensor3

__all__ = [
    "read_tensor",
    "write_tensor",
    "read_mask",
    "write_mask",
    "read_matrix",
    "write_matrix",
    "TENSOR_MAGIC",
    "MASK_MAGIC",
]

TENSOR_MAGIC = b"TNS1"
MASK_MAGIC = b"MSK1"

_FLAG_COMPLEX = 0x1
_FLAG_REAL_HINT = 0x2

# byte offsets inside the fixed headers, used in diagnostics
_OFF_FLAGS = 4
_OFF_TENSOR_DIMS = 5
_OFF_TENSOR_PAYLOAD = 29
_OFF_MASK_DIMS = 4
_OFF_MASK_COUNT = 28
_OFF_MASK_TRIPLES = 36

_MAX_ELEMENTS = 1 << 48


def _read_exact(fh, n, offset, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(
            f"truncated {what} at byte {offset}: expected {n} bytes, "
            f"found {len(buf)}")
    return buf


def _check_magic(fh, magic, path):
    got = fh.read(len(magic))
    if got != magic:
        raise FormatError(
            f"{path}: bad magic at byte 0: expected {magic!r}, got {got!r}")


def _read_dims(fh, offset, what):
    buf = _read_exact(fh, 24, offset, what)
    dims = struct.unpack("<3Q", buf)
    if any(d < 1 for d in dims):
        raise FormatError(
            f"invalid dims {dims} at byte {offset}: all must be >= 1")
    if dims[0] * dims[1] * dims[2] > _MAX_ELEMENTS:
        raise FormatError(
            f"dims {dims} at byte {offset} overflow the element limit")
    return dims


def write_tensor(path, t: Tensor3) -> None:
    """Serialize a tensor; the payload stays complex only when it has to."""
    data = t.data
    complex_payload = bool(np.any(data.imag != 0.0))
    flags = (_FLAG_COMPLEX if complex_payload else 0) \
        | (_FLAG_REAL_HINT if t.real_hint else 0)
    n1, n2, n3 = t.dims
    flat = data.ravel(order="F")
    if complex_payload:
        payload = flat.astype("<c16").tobytes()
    else:
        payload = flat.real.astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<B", flags))
        fh.write(struct.pack("<3Q", n1, n2, n3))
        fh.write(payload)


def read_tensor(path) -> Tensor3:
    """Parse a tensor file, verifying header, size, and finiteness."""
    with open(path, "rb") as fh:
        _check_magic(fh, TENSOR_MAGIC, path)
        flags = _read_exact(fh, 1, _OFF_FLAGS, "flags byte")[0]
        if flags & ~(_FLAG_COMPLEX | _FLAG_REAL_HINT):
            raise FormatError(
                f"unknown flag bits 0x{flags:02x} at byte {_OFF_FLAGS}")
        dims = _read_dims(fh, _OFF_TENSOR_DIMS, "tensor dims")
        count = dims[0] * dims[1] * dims[2]
        complex_payload = bool(flags & _FLAG_COMPLEX)
        itemsize = 16 if complex_payload else 8
        payload = _read_exact(fh, count * itemsize, _OFF_TENSOR_PAYLOAD,
                              "tensor payload")
        trailing = fh.read(1)
        if trailing:
            raise FormatError(
                f"trailing data at byte {_OFF_TENSOR_PAYLOAD + count * itemsize}")
    dtype = "<c16" if complex_payload else "<f8"
    flat = np.frombuffer(payload, dtype=dtype)
    arr = flat.reshape(dims, order="F")
    return Tensor3(arr, real_hint=bool(flags & _FLAG_REAL_HINT))


def write_mask(path, mask: SamplingMask) -> None:
    """Serialize a sampling mask; indices are already lexicographically sorted."""
    n1, n2, n3 = mask.dims
    with open(path, "wb") as fh:
        fh.write(MASK_MAGIC)
        fh.write(struct.pack("<3Q", n1, n2, n3))
        fh.write(struct.pack("<Q", mask.count))
        fh.write(mask.indices.astype("<u8").tobytes())


def read_mask(path) -> SamplingMask:
    """Parse a mask file; order, duplicates, and ranges are all enforced."""
    with open(path, "rb") as fh:
        _check_magic(fh, MASK_MAGIC, path)
        dims = _read_dims(fh, _OFF_MASK_DIMS, "mask dims")
        count_buf = _read_exact(fh, 8, _OFF_MASK_COUNT, "mask count")
        count = struct.unpack("<Q", count_buf)[0]
        if count > dims[0] * dims[1] * dims[2]:
            raise FormatError(
                f"mask count {count} at byte {_OFF_MASK_COUNT} exceeds "
                f"the {dims[0] * dims[1] * dims[2]} cells of dims {dims}")
        payload = _read_exact(fh, count * 24, _OFF_MASK_TRIPLES, "mask triples")
        trailing = fh.read(1)
        if trailing:
            raise FormatError(
                f"trailing data at byte {_OFF_MASK_TRIPLES + count * 24}")
    idx = np.frombuffer(payload, dtype="<u8").reshape(-1, 3)
    if np.any(idx >= np.array(dims, dtype=np.uint64)):
        bad = int(np.argmax(np.any(idx >= np.array(dims, dtype=np.uint64), axis=1)))
        raise FormatError(
            f"mask index {tuple(int(v) for v in idx[bad])} out of range for "
            f"dims {dims} at byte {_OFF_MASK_TRIPLES + bad * 24}")
    if idx.shape[0] > 1:
        keys = (idx[:, 0], idx[:, 1], idx[:, 2])
        flat = np.ravel_multi_index(keys, dims)
        steps = np.diff(flat.astype(np.int64))
        if np.any(steps <= 0):
            bad = int(np.argmax(steps <= 0)) + 1
            raise FormatError(
                f"mask triples not strictly increasing at byte "
                f"{_OFF_MASK_TRIPLES + bad * 24}")
    return SamplingMask(dims, idx.astype(np.int64))


def write_matrix(path, matrix: np.ndarray) -> None:
    """Store a 2-D transform matrix as a one-slice tensor file."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise FormatError(f"matrix must be 2-D, got shape {matrix.shape}")
    write_tensor(path, Tensor3(matrix[:, :, None].astype(np.complex128)))


def read_matrix(path) -> np.ndarray:
    """Read back a 2-D matrix stored by ``write_matrix``."""
    t = read_tensor(path)
    if t.dims[2] != 1:
        raise FormatError(
            f"matrix file must have one slice, got dims {t.dims}")
    return np.array(t.data[:, :, 0])
