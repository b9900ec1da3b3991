"""Order-3 complex tensors and the slice-wise product algebra.

A ``Tensor3`` wraps a dense complex array of shape (n1, n2, n3); the k-th
frontal slice is the matrix ``A[:, :, k]``. Products, transposes, and the
tensor SVD all act slice by slice. The spectral norm is the largest
per-slice singular value, the nuclear norm is the sum of all per-slice
singular values (the spectral norm's dual), and ``inf2_norm`` takes the
largest l2 norm over row fibers (i, :, :) and column fibers (:, j, :).

Entries are complex128 throughout, even for real-valued data; the
``real_hint`` flag records that a tensor semantically holds real data and
only governs casting at output boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ShapeError

__all__ = [
    "Tensor3",
    "TSvdFactors",
    "t_product",
    "t_transpose",
    "t_conj_transpose",
    "identity_tensor",
    "is_unitary",
    "t_svd",
    "tubal_rank",
    "spectral_norm",
    "nuclear_norm",
    "fro_norm",
    "inf_norm",
    "inf2_norm",
    "inner_product",
    "mode3_product",
]


@dataclass(frozen=True)
class Tensor3:
    """Immutable dense complex tensor of shape (n1, n2, n3)."""

    data: np.ndarray
    real_hint: bool = False

    def __post_init__(self):
        # C layout pinned so identical values give identical results no
        # matter how the source array was laid out
        arr = np.array(self.data, dtype=np.complex128, copy=True, order="C")
        if arr.ndim != 3:
            raise ShapeError(f"Tensor3 requires 3 dims, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise DomainError("Tensor3 entries must be finite")
        if self.real_hint:
            bound = 1e-12 * (float(np.linalg.norm(arr)) + 1.0)
            if arr.size and float(np.max(np.abs(arr.imag))) > bound:
                raise DomainError(
                    "real_hint set but imaginary parts exceed "
                    f"1e-12*(fro_norm+1) = {bound:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dims(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor3(dims={self.dims}, real_hint={self.real_hint})"

    def _binary_check(self, other):
        if not isinstance(other, Tensor3):
            raise TypeError("expected a Tensor3 operand")
        if other.dims != self.dims:
            raise ShapeError(f"dims mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other):
        self._binary_check(other)
        return _wrap(self.data + other.data, self.real_hint and other.real_hint)

    def __sub__(self, other):
        self._binary_check(other)
        return _wrap(self.data - other.data, self.real_hint and other.real_hint)

    def __mul__(self, c):
        c = complex(c)
        return _wrap(self.data * c, self.real_hint and c.imag == 0.0)

    __rmul__ = __mul__

    def __neg__(self):
        return _wrap(-self.data, self.real_hint)


def _wrap(arr, real_hint=False):
    """Build a Tensor3 around an array we own, skipping the defensive copy."""
    t = object.__new__(Tensor3)
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.setflags(write=False)
    object.__setattr__(t, "data", arr)
    object.__setattr__(t, "real_hint", real_hint)
    return t


@dataclass(frozen=True)
class TSvdFactors:
    """Skinny slice-wise SVD factors: A(:,:,k) = U_k diag(S[:,k]) V_k^H.

    ``s`` is a real (min(n1,n2), n3) array, non-negative and non-increasing
    down each column; ``s_tensor()`` embeds it as a diagonal Tensor3 when the
    factorization is needed in product form.
    """

    u: Tensor3
    s: np.ndarray
    v: Tensor3

    def __post_init__(self):
        s = np.array(self.s, dtype=np.float64, copy=True)
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    def truncate(self, r):
        """Keep the leading r tubes of every factor."""
        if not 1 <= r <= self.s.shape[0]:
            raise DomainError(
                f"truncation rank {r} outside [1, {self.s.shape[0]}]")
        return TSvdFactors(_wrap(self.u.data[:, :r, :]),
                           self.s[:r, :],
                           _wrap(self.v.data[:, :r, :]))

    def s_tensor(self):
        """Diagonal Tensor3 of shape (s, s, n3) holding the singular values."""
        s_dim, n3 = self.s.shape
        out = np.zeros((s_dim, s_dim, n3), dtype=np.complex128)
        idx = np.arange(s_dim)
        out[idx, idx, :] = self.s
        return _wrap(out)

    def reconstruct(self):
        """U * diag(S) * V^H as a Tensor3."""
        us = np.moveaxis(self.u.data, 2, 0) * self.s.T[:, None, :]
        vh = np.moveaxis(self.v.data, 2, 0).conj().transpose(0, 2, 1)
        return _wrap(np.moveaxis(us @ vh, 0, 2))


def t_product(a: Tensor3, b: Tensor3) -> Tensor3:
    """Slice-wise product: C(:,:,k) = A(:,:,k) B(:,:,k)."""
    if a.dims[2] != b.dims[2] or a.dims[1] != b.dims[0]:
        raise ShapeError(f"t_product: cannot multiply {a.dims} by {b.dims}")
    c = np.moveaxis(a.data, 2, 0) @ np.moveaxis(b.data, 2, 0)
    return _wrap(np.moveaxis(c, 0, 2))


def t_transpose(a: Tensor3) -> Tensor3:
    """Slice-wise transpose; dims (n1,n2,n3) -> (n2,n1,n3)."""
    return _wrap(a.data.transpose(1, 0, 2).copy(), a.real_hint)


def t_conj_transpose(a: Tensor3) -> Tensor3:
    """Slice-wise conjugate transpose; dims (n1,n2,n3) -> (n2,n1,n3)."""
    return _wrap(a.data.conj().transpose(1, 0, 2).copy(), a.real_hint)


def identity_tensor(n: int, n3: int) -> Tensor3:
    """Tensor whose every frontal slice is the n x n identity."""
    if n < 1 or n3 < 1:
        raise ShapeError(f"identity_tensor dims must be positive, got ({n}, {n3})")
    data = np.repeat(np.eye(n, dtype=np.complex128)[:, :, None], n3, axis=2)
    return _wrap(data, real_hint=True)


def is_unitary(u: Tensor3, tol: float = 1e-10) -> bool:
    """True iff every slice is unitary: ||U U^H - I||_F and ||U^H U - I||_F <= tol."""
    n1, n2, _ = u.dims
    if n1 != n2:
        raise ShapeError(f"is_unitary requires square slices, got {u.dims}")
    i = identity_tensor(n1, u.dims[2])
    uh = t_conj_transpose(u)
    return (fro_norm(t_product(u, uh) - i) <= tol
            and fro_norm(t_product(uh, u) - i) <= tol)


def t_svd(a: Tensor3) -> TSvdFactors:
    """Skinny SVD of every frontal slice, batched."""
    stack = np.moveaxis(a.data, 2, 0)
    try:
        u, s, vh = np.linalg.svd(stack, full_matrices=False)
    except np.linalg.LinAlgError:
        for k in range(stack.shape[0]):
            try:
                np.linalg.svd(stack[k], full_matrices=False)
            except np.linalg.LinAlgError as e:
                raise NumericError(f"SVD failed on slice {k}: {e}") from e
        raise
    return TSvdFactors(_wrap(np.moveaxis(u, 0, 2)),
                       s.T,
                       _wrap(np.moveaxis(vh.conj().transpose(0, 2, 1), 0, 2)))


def tubal_rank(f, eps_rank: float = 1e-8) -> int:
    """Number of singular tubes with l2 norm above eps_rank * global max.

    Accepts either precomputed ``TSvdFactors`` or a ``Tensor3``.
    """
    if eps_rank <= 0:
        raise DomainError("eps_rank must be positive")
    if isinstance(f, Tensor3):
        f = t_svd(f)
    smax = float(f.s.max()) if f.s.size else 0.0
    if smax == 0.0:
        return 0
    tube_norms = np.sqrt(np.sum(f.s ** 2, axis=1))
    return int(np.count_nonzero(tube_norms > eps_rank * smax))


def _singular_values(a: Tensor3) -> np.ndarray:
    return np.linalg.svd(np.moveaxis(a.data, 2, 0), compute_uv=False)


def spectral_norm(a: Tensor3) -> float:
    """Largest singular value over all slices."""
    return float(np.max(_singular_values(a)))


def nuclear_norm(a: Tensor3) -> float:
    """Sum of all singular values over all slices."""
    return float(np.sum(_singular_values(a)))


def fro_norm(a: Tensor3) -> float:
    return float(np.linalg.norm(a.data))


def inf_norm(a: Tensor3) -> float:
    """Largest entry magnitude."""
    return float(np.max(np.abs(a.data)))


def inf2_norm(a: Tensor3) -> float:
    """Largest l2 norm over row fibers (i,:,:) and column fibers (:,j,:)."""
    sq = np.abs(a.data) ** 2
    row_best = float(np.max(np.sum(sq, axis=(1, 2))))
    col_best = float(np.max(np.sum(sq, axis=(0, 2))))
    return float(np.sqrt(max(row_best, col_best)))


def inner_product(a: Tensor3, b: Tensor3) -> complex:
    """Sum of conj(A) .* B over all entries."""
    if a.dims != b.dims:
        raise ShapeError(f"inner_product dims mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.data, b.data))


def mode3_product(a: Tensor3, t: np.ndarray) -> Tensor3:
    """Apply a matrix along the third mode: out(i,j,k') = sum_k T(k',k) A(i,j,k)."""
    t = np.asarray(t, dtype=np.complex128)
    if t.ndim != 2 or t.shape[1] != a.dims[2]:
        raise ShapeError(
            f"mode3_product: matrix shape {t.shape} does not act on third "
            f"mode of {a.dims}")
    return _wrap(np.tensordot(a.data, t, axes=([2], [1])))
