"""Linear transforms along the third mode and their diagnostics.

A transform is a complex N3 x n3 matrix T with full column rank (a linear
injection of tube space). ``LinearTransform`` caches the Moore-Penrose
pseudo-inverse and the diagnostics that govern recovery difficulty:

* ``kappa``: condition number sigma_max / sigma_min,
* ``rho``: N3 * max(max|T|^2, max|T_pinv|^2) over entries,
* ``one_to_two``: the largest column l2 norm ||T||_{1->2}.

Constructors cover the unitary DFT, orthonormal DCT-II, Walsh-Hadamard,
slim (tall) column selections, vertical concatenations, seeded random
unitary matrices, and random matrices with prescribed singular value range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import DomainError, ShapeError, SingularTransformError
from .tensor import Tensor3, mode3_product

__all__ = [
    "LinearTransform",
    "dft_transform",
    "dct_transform",
    "dwht_transform",
    "slim_columns",
    "concat_transforms",
    "random_unitary",
    "random_conditioned",
    "pseudo_inverse",
]

# Columns whose singular value falls below RANK_TOL * sigma_max make the
# matrix rank deficient for our purposes.
RANK_TOL = 1e-12


def pseudo_inverse(matrix: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudo-inverse V diag(1/s) U^H of a full-column-rank matrix."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    if s.size == 0 or s[-1] <= RANK_TOL * s[0]:
        raise SingularTransformError(
            f"matrix of shape {matrix.shape} is rank deficient "
            f"(sigma_min={0.0 if s.size == 0 else s[-1]:.3e})")
    return (vh.conj().T * (1.0 / s)) @ u.conj().T


@dataclass(frozen=True)
class LinearTransform:
    """An injective third-mode transform with cached diagnostics.

    Use ``LinearTransform.from_matrix`` or one of the named constructors;
    the plain constructor expects already-validated fields.
    """

    matrix: np.ndarray
    pinv: np.ndarray
    name: str
    sigma_max: float
    sigma_min: float
    rho: float
    one_to_two: float

    @classmethod
    def from_matrix(cls, matrix, name="custom"):
        matrix = np.array(matrix, dtype=np.complex128, copy=True, order="C")
        if matrix.ndim != 2:
            raise ShapeError(f"transform matrix must be 2-D, got {matrix.shape}")
        big_n3, n3 = matrix.shape
        if n3 < 1:
            raise ShapeError("transform must have at least one column")
        if not np.all(np.isfinite(matrix)):
            raise DomainError("transform matrix entries must be finite")
        if big_n3 < n3:
            raise SingularTransformError(
                f"matrix of shape {matrix.shape} cannot be injective "
                "(fewer rows than columns)")
        s = np.linalg.svd(matrix, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise SingularTransformError(
                f"transform '{name}' is rank deficient: sigma_min={s[-1]:.3e} "
                f"<= 1e-10 * sigma_max={s[0]:.3e}")
        pinv = pseudo_inverse(matrix)
        rho = big_n3 * max(float(np.max(np.abs(matrix)) ** 2),
                           float(np.max(np.abs(pinv)) ** 2))
        one_to_two = float(np.sqrt(np.max(np.sum(np.abs(matrix) ** 2, axis=0))))
        matrix.setflags(write=False)
        pinv.setflags(write=False)
        return cls(matrix=matrix, pinv=pinv, name=name,
                   sigma_max=float(s[0]), sigma_min=float(s[-1]),
                   rho=rho, one_to_two=one_to_two)

    @property
    def n3(self) -> int:
        return self.matrix.shape[1]

    @property
    def N3(self) -> int:
        return self.matrix.shape[0]

    @property
    def kappa(self) -> float:
        return self.sigma_max / self.sigma_min

    def is_isometry(self, tol: float = 1e-10) -> bool:
        """True iff all singular values are 1 within tol (norm preserving)."""
        return abs(self.sigma_max - 1.0) <= tol and abs(self.sigma_min - 1.0) <= tol

    def apply(self, a: Tensor3) -> Tensor3:
        """Transform-domain image: mode-3 product with the matrix."""
        return mode3_product(a, self.matrix)

    def pinv_apply(self, b: Tensor3) -> Tensor3:
        """Least-squares pullback: mode-3 product with the pseudo-inverse."""
        return mode3_product(b, self.pinv)

    def __repr__(self):
        return (f"LinearTransform(name={self.name!r}, shape={self.N3}x{self.n3}, "
                f"kappa={self.kappa:.4g})")


def _dft_matrix(n):
    return np.asarray(scipy.linalg.dft(n, scale="sqrtn"), dtype=np.complex128)


def _dct_matrix(n):
    # Orthonormal DCT-II: column j is the transform of the j-th basis vector.
    return np.asarray(scipy.fft.dct(np.eye(n), axis=0, norm="ortho"),
                      dtype=np.complex128)


def _haar_matrix(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def dft_transform(n3: int) -> LinearTransform:
    """Unitary (1/sqrt(n3)-scaled) DFT matrix."""
    if n3 < 1:
        raise DomainError("n3 must be >= 1")
    return LinearTransform.from_matrix(_dft_matrix(n3), name=f"dft{n3}")


def dct_transform(n3: int) -> LinearTransform:
    """Orthonormal DCT-II matrix."""
    if n3 < 1:
        raise DomainError("n3 must be >= 1")
    return LinearTransform.from_matrix(_dct_matrix(n3), name=f"dct{n3}")


def dwht_transform(n3: int) -> LinearTransform:
    """Orthonormal Walsh-Hadamard matrix in natural order; n3 a power of two."""
    if n3 < 1 or (n3 & (n3 - 1)) != 0:
        raise DomainError(
            f"Walsh-Hadamard transform requires a power-of-two size, got {n3}")
    mat = scipy.linalg.hadamard(n3).astype(np.float64) / np.sqrt(n3)
    return LinearTransform.from_matrix(mat, name=f"dwht{n3}")


def slim_columns(kind: str, big_n3: int, n3: int, seed: int = 0) -> LinearTransform:
    """First n3 columns of an N3 x N3 base matrix of the given kind.

    ``kind`` is one of "dft", "dct", "random_unitary". With big_n3 == n3 the
    result equals the square transform.
    """
    if big_n3 < n3:
        raise DomainError(f"slim transform needs N3 >= n3, got {big_n3} < {n3}")
    if n3 < 1:
        raise DomainError("n3 must be >= 1")
    if kind == "dft":
        base = _dft_matrix(big_n3)
    elif kind == "dct":
        base = _dct_matrix(big_n3)
    elif kind == "random_unitary":
        base = _haar_matrix(big_n3, np.random.default_rng(seed))
    else:
        raise DomainError(f"unknown slim transform kind {kind!r}")
    return LinearTransform.from_matrix(base[:, :n3],
                                       name=f"{kind}{big_n3}x{n3}")


def concat_transforms(t1, t2) -> LinearTransform:
    """Vertical stack [T1; T2]; diagnostics recomputed from scratch.

    Operands may be LinearTransform instances or raw matrices (a zero-row
    matrix concatenates to the other operand unchanged).
    """
    m1, name1 = _operand(t1)
    m2, name2 = _operand(t2)
    if m1.shape[1] != m2.shape[1]:
        raise ShapeError(
            f"concat_transforms column mismatch: {m1.shape} vs {m2.shape}")
    return LinearTransform.from_matrix(np.vstack([m1, m2]),
                                       name=f"concat({name1},{name2})")


def _operand(t):
    if isinstance(t, LinearTransform):
        return t.matrix, t.name
    mat = np.asarray(t, dtype=np.complex128)
    if mat.ndim != 2:
        raise ShapeError(f"concat operand must be 2-D, got shape {mat.shape}")
    return mat, "matrix"


def random_unitary(n3: int, big_n3: int | None = None, seed: int = 0) -> LinearTransform:
    """First n3 columns of a seeded Haar-like N3 x N3 unitary."""
    big_n3 = n3 if big_n3 is None else big_n3
    if n3 < 1:
        raise DomainError("n3 must be >= 1")
    if big_n3 < n3:
        raise DomainError(f"random_unitary needs N3 >= n3, got {big_n3} < {n3}")
    base = _haar_matrix(big_n3, np.random.default_rng(seed))
    return LinearTransform.from_matrix(base[:, :n3],
                                       name=f"rut{big_n3}x{n3}s{seed}")


def random_conditioned(n3: int, seed: int = 0, smin: float = 0.5,
                       smax: float = 2.0, big_n3: int | None = None) -> LinearTransform:
    """U diag(s) V^H with singular values drawn i.i.d. uniform in [smin, smax].

    The singular values are drawn first from the seeded generator, then the
    two unitary factors; the realized condition number is at most smax/smin.
    With big_n3 > n3 the diagonal is embedded as the top-left block.
    """
    if not 0 < smin <= smax:
        raise DomainError(f"need 0 < smin <= smax, got [{smin}, {smax}]")
    big_n3 = n3 if big_n3 is None else big_n3
    if n3 < 1 or big_n3 < n3:
        raise DomainError(f"invalid sizes N3={big_n3}, n3={n3}")
    rng = np.random.default_rng(seed)
    s = rng.uniform(smin, smax, size=n3)
    u = _haar_matrix(big_n3, rng)
    v = _haar_matrix(n3, rng)
    sigma = np.zeros((big_n3, n3))
    sigma[np.arange(n3), np.arange(n3)] = s
    mat = u @ sigma @ v.conj().T
    return LinearTransform.from_matrix(
        mat, name=f"cond{big_n3}x{n3}s{seed}[{smin:g},{smax:g}]")
