"""Singular value thresholding and the penalized completion loop.

The completion program seeks the tensor X agreeing with the observed
entries whose transform-domain image T(X) has minimal nuclear norm. It is
solved by an alternating scheme with a split variable Y for T(X), a
multiplier Z, and a geometrically growing penalty alpha:

    Y <- svt(T(X) + Z/alpha, 1/alpha)
    X <- unobserved entries from the pullback T_pinv(Y - Z/alpha),
         observed entries copied verbatim from the data
    Z <- Z + alpha (T(X) - Y)
    alpha <- min(growth * alpha, alpha_max)

The X step is computed with the freshly updated Y. Iteration stops when
the largest entrywise change across X, Y, and T(X), together with the
split-constraint violation max|T(X) - Y|, drops to ``tol``. The violation
term matters: early on the threshold 1/alpha exceeds the data scale, so Y
sticks at zero and X at the observed projection while the multiplier
accumulates; successive differences alone would report a spurious fixed
point there.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ShapeError
from .tensor import Tensor3, _wrap, nuclear_norm
from .transforms import LinearTransform

__all__ = [
    "SamplingMask",
    "SolverConfig",
    "SolverReport",
    "mask_project",
    "svt",
    "y_update",
    "x_update",
    "z_update",
    "penalty_update",
    "admm_complete",
]


@dataclass(frozen=True)
class SamplingMask:
    """Set of observed (i, j, k) indices within a fixed shape.

    Indices are canonicalized to lexicographic order; duplicates and
    out-of-range entries are rejected.
    """

    dims: tuple
    indices: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ShapeError(f"mask dims must be 3 positive sizes, got {self.dims}")
        idx = np.array(self.indices, dtype=np.int64).reshape(-1, 3)
        if idx.size:
            if idx.min() < 0 or np.any(idx >= np.array(dims, dtype=np.int64)):
                raise DomainError(
                    f"mask indices out of range for dims {dims}")
            order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0]))
            idx = idx[order]
            same = np.all(idx[1:] == idx[:-1], axis=1)
            if np.any(same):
                where = int(np.argmax(same))
                raise DomainError(
                    f"duplicate mask index {tuple(idx[where])}")
        idx.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_bool(cls, array):
        array = np.asarray(array, dtype=bool)
        if array.ndim != 3:
            raise ShapeError(f"mask array must be 3-D, got shape {array.shape}")
        return cls(array.shape, np.argwhere(array))

    @property
    def count(self) -> int:
        return self.indices.shape[0]

    @property
    def rate(self) -> float:
        n1, n2, n3 = self.dims
        return self.count / (n1 * n2 * n3)

    @cached_property
    def _bool(self):
        out = np.zeros(self.dims, dtype=bool)
        if self.count:
            out[self.indices[:, 0], self.indices[:, 1], self.indices[:, 2]] = True
        out.setflags(write=False)
        return out

    def bool_array(self) -> np.ndarray:
        """Read-only boolean array of the observed positions."""
        return self._bool


@dataclass(frozen=True)
class SolverConfig:
    alpha0: float = 1e-2
    alpha_max: float = 1e6
    rho_growth: float = 1.02
    tol: float = 1e-10
    max_iters: int = 3000

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise DomainError("alpha0 must be positive")
        if not self.alpha_max >= self.alpha0:
            raise DomainError("alpha_max must be >= alpha0")
        if not self.rho_growth >= 1:
            raise DomainError("rho_growth must be >= 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if not self.max_iters >= 1:
            raise DomainError("max_iters must be >= 1")


@dataclass(frozen=True)
class SolverReport:
    iterations: int
    final_residual: float
    objective: float
    converged: bool
    history: list | None = None
    imag_residue: float | None = None


def mask_project(a: Tensor3, mask: SamplingMask) -> Tensor3:
    """Keep observed entries, zero the rest."""
    if mask.dims != a.dims:
        raise ShapeError(f"mask dims {mask.dims} do not match tensor {a.dims}")
    out = np.zeros_like(a.data)
    mb = mask.bool_array()
    out[mb] = a.data[mb]
    return _wrap(out, a.real_hint)


def svt(a: Tensor3, tau: float) -> Tensor3:
    """Shrink every slice's singular values by tau and clamp at zero."""
    if tau < 0:
        raise DomainError("svt threshold must be >= 0")
    stack = np.moveaxis(a.data, 2, 0)
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    out = (u * np.maximum(s - tau, 0.0)[:, None, :]) @ vh
    return _wrap(np.moveaxis(out, 0, 2))


def _y_step(tx: Tensor3, z: Tensor3, alpha: float) -> Tensor3:
    return svt(_wrap(tx.data + z.data / alpha), 1.0 / alpha)


def _z_step(z: Tensor3, tx: Tensor3, y: Tensor3, alpha: float) -> Tensor3:
    return _wrap(z.data + alpha * (tx.data - y.data))


def y_update(x: Tensor3, z: Tensor3, alpha: float,
             transform: LinearTransform) -> Tensor3:
    """Split-variable step: svt(T(X) + Z/alpha, 1/alpha)."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return _y_step(transform.apply(x), z, alpha)


def x_update(y: Tensor3, z: Tensor3, alpha: float, mask: SamplingMask,
             observed: Tensor3, transform: LinearTransform) -> Tensor3:
    """Data step: pullback on unobserved entries, verbatim data on observed."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    pull = transform.pinv_apply(_wrap(y.data - z.data / alpha))
    out = pull.data.copy()
    mb = mask.bool_array()
    out[mb] = observed.data[mb]
    return _wrap(out)


def z_update(z: Tensor3, alpha: float, x: Tensor3, y: Tensor3,
             transform: LinearTransform) -> Tensor3:
    """Multiplier step: Z + alpha (T(X) - Y)."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return _z_step(z, transform.apply(x), y, alpha)


def penalty_update(alpha: float, cfg: SolverConfig) -> float:
    """Geometric growth capped at alpha_max."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return min(cfg.rho_growth * alpha, cfg.alpha_max)


def _max_abs_diff(a: Tensor3, b: Tensor3) -> float:
    return float(np.max(np.abs(a.data - b.data)))


def admm_complete(observed: Tensor3, mask: SamplingMask,
                  transform: LinearTransform, cfg: SolverConfig | None = None,
                  on_iterate=None, record_history: bool = False):
    """Complete ``observed`` on the mask's complement; returns (X, report).

    Only the observed entries of ``observed`` are read. The observed entries
    of every iterate (and of the returned X) equal the input bit-exactly.
    When ``observed`` carries real_hint and the transform is real, the real
    part of X is returned and the discarded imaginary magnitude is reported
    as ``report.imag_residue``.

    ``on_iterate(iteration, x, residual)``, if given, is called once per
    iteration with the fresh X iterate. Non-convergence within max_iters is
    reported via ``converged=False``, not an exception.
    """
    cfg = SolverConfig() if cfg is None else cfg
    if mask.dims != observed.dims:
        raise ShapeError(
            f"mask dims {mask.dims} do not match tensor {observed.dims}")
    if transform.n3 != observed.dims[2]:
        raise ShapeError(
            f"transform acts on n3={transform.n3}, tensor has n3={observed.dims[2]}")
    if mask.count == 0:
        raise DomainError("mask observes no entries")

    x = mask_project(observed, mask)
    tx = transform.apply(x)
    y = tx
    z = _wrap(np.zeros_like(tx.data))
    alpha = cfg.alpha0
    history = [] if record_history else None
    converged = False
    stat = float("inf")
    iterations = 0

    for iteration in range(1, cfg.max_iters + 1):
        y_new = _y_step(tx, z, alpha)
        x_new = x_update(y_new, z, alpha, mask, observed, transform)
        tx_new = transform.apply(x_new)
        z = _z_step(z, tx_new, y_new, alpha)
        stat = max(_max_abs_diff(x_new, x), _max_abs_diff(y_new, y),
                   _max_abs_diff(tx_new, tx), _max_abs_diff(tx_new, y_new))
        x, y, tx = x_new, y_new, tx_new
        iterations = iteration
        if record_history:
            history.append((stat, nuclear_norm(tx)))
        if on_iterate is not None:
            on_iterate(iteration, x, stat)
        alpha = penalty_update(alpha, cfg)
        if stat <= cfg.tol:
            converged = True
            break

    imag_residue = None
    if observed.real_hint and np.all(transform.matrix.imag == 0.0):
        imag_residue = float(np.max(np.abs(x.data.imag)))
        x = _wrap(x.data.real.astype(np.complex128), real_hint=True)

    report = SolverReport(iterations=iterations, final_residual=stat,
                          objective=nuclear_norm(tx), converged=converged,
                          history=history, imag_residue=imag_residue)
    return x, report
