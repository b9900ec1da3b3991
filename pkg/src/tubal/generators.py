"""Random low-tubal-rank tensors and Bernoulli sampling masks.

The generators alternate truncated t-SVD projection (nearest tensor whose
transform has tubal rank at most r) with a least-squares pullback through the
transform, plus a unit-energy normalization that keeps the iteration away
from zero. Convergence is declared when the (r+1)-th tube norm of the
transformed tensor falls below rank_tol times the top tube norm.

Plain alternation contracts at a rate that degrades badly with size (tens of
thousands of passes at 50x50x20), so once the tube-norm ratio is small and a
spectral gap has opened, the loop switches to damped Newton steps on the
fixed-point residual. The truncation map is differentiable there and its
derivative is the tangent-space projector, which makes the Newton system a
Hermitian sandwich of orthogonal projectors; a few hundred conjugate-gradient
iterations solve it. Every candidate step is accepted only if the exact
tube-norm ratio (full t-SVD, same criterion as the plain loop) improves, so
the returned tensor satisfies the advertised contract regardless of path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeneratorError, ShapeError
from .tensor import Tensor3, _wrap, fro_norm, t_svd
from .transforms import LinearTransform

__all__ = [
    "GeneratorConfig",
    "truncated_t_svd_project",
    "gen_single",
    "gen_double",
    "bernoulli_mask",
]

_STALL_WINDOW = 50
_STALL_IMPROVEMENT = 1e-3
_MAX_RESTARTS = 3
_NEWTON_ENTRY = 1e-2
_CG_CAP = 600


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the alternating-projection generators.

    max_iters caps one attempt (plain passes plus Newton steps); rank_tol is
    the relative tube-norm threshold declaring the target rank achieved; seed
    fixes the initial random tensor (restart draws continue the same stream).
    """

    max_iters: int = 500
    rank_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")
        if not self.rank_tol > 0:
            raise DomainError("rank_tol must be positive")


def truncated_t_svd_project(a: Tensor3, r: int) -> Tensor3:
    """Nearest tensor of tubal rank <= r in Frobenius distance.

    Keeps the r strongest singular tubes (per-slice sorting makes tube norms
    non-increasing, so these are the global top-r) and zeroes the rest.
    """
    s_dim = min(a.dims[0], a.dims[1])
    if not 1 <= r <= s_dim:
        raise DomainError(f"target rank {r} outside [1, {s_dim}]")
    factors = t_svd(a)
    if r == s_dim:
        return factors.reconstruct()
    return factors.truncate(r).reconstruct()


def _initial(rng: np.random.Generator, dims, real: bool) -> np.ndarray:
    """Stacked (n3, n1, n2) Gaussian start, complex unless real is set."""
    shape = (dims[2], dims[0], dims[1])
    if real:
        return rng.standard_normal(shape).astype(np.complex128)
    return (rng.standard_normal(shape)
            + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _check_dims(dims, transform: LinearTransform, r: int) -> None:
    if len(dims) != 3 or any(int(d) <= 0 for d in dims):
        raise ShapeError(f"dims must be three positive integers, got {dims}")
    if transform.n3 != dims[2]:
        raise ShapeError(
            f"transform acts on n3={transform.n3}, dims have n3={dims[2]}")
    if not 1 <= r <= min(dims[0], dims[1]):
        raise DomainError(
            f"target rank {r} outside [1, {min(dims[0], dims[1])}]")


class _StallDetector:
    """Flags an attempt whose ratio stops improving for a while."""

    def __init__(self):
        self.best = np.inf
        self.since_improvement = 0

    def update(self, ratio: float) -> bool:
        if ratio < self.best * (1.0 - _STALL_IMPROVEMENT):
            self.best = ratio
            self.since_improvement = 0
        else:
            self.since_improvement += 1
        return self.since_improvement >= _STALL_WINDOW


def _unstack(arr: np.ndarray, real_hint: bool = False) -> Tensor3:
    return _wrap(np.ascontiguousarray(np.moveaxis(arr, 0, 2)),
                 real_hint=real_hint)


def _maybe_real(m: Tensor3, real: bool) -> Tensor3:
    if not real:
        return m
    bound = 1e-12 * (fro_norm(m) + 1.0)
    if float(np.max(np.abs(m.data.imag))) <= bound:
        return _wrap(m.data.real.astype(np.complex128), real_hint=True)
    return m


def _svd_ratio(stacked: np.ndarray, r: int):
    """Exact slice SVDs plus the (r+1)/1 tube-norm ratio."""
    u, s, vh = np.linalg.svd(stacked, full_matrices=False)
    tubes = np.linalg.norm(s, axis=0)
    if r >= tubes.shape[0] or tubes[0] == 0.0:
        ratio = 0.0
    else:
        ratio = float(tubes[r] / tubes[0])
    return u, s, vh, ratio


def _low_rank_part(u, s, vh, r):
    return (u[:, :, :r] * s[:, None, :r]) @ vh[:, :r, :]


def _tangent_projector(u, vh, r):
    """Slice-wise projector onto the tangent space of the rank-r manifold."""
    big_u = np.ascontiguousarray(u[:, :, :r])
    big_vh = np.ascontiguousarray(vh[:, :r, :])
    big_uh = big_u.conj().transpose(0, 2, 1)
    big_v = big_vh.conj().transpose(0, 2, 1)

    def ptan(x):
        a = big_uh @ x
        b = (x - big_u @ a) @ big_v
        return big_u @ a + b @ big_vh

    return ptan


def _damped_cg(apply_op, rhs, lam, cap):
    """CG on (op + lam I) d = rhs; op must be Hermitian PSD."""
    d = np.zeros_like(rhs)
    resid = rhs.copy()
    p = resid.copy()
    rs = np.vdot(resid, resid).real
    floor = 1e-2 * np.sqrt(rs)
    for _ in range(cap):
        if np.sqrt(rs) <= floor:
            break
        ap = apply_op(p) + lam * p
        denom = np.vdot(p, ap).real
        if denom <= 0.0:
            break
        alpha = rs / denom
        d += alpha * p
        resid -= alpha * ap
        rs_new = np.vdot(resid, resid).real
        p = resid + (rs_new / rs) * p
        rs = rs_new
    return d


def _single_attempt(transform, gs, r, cfg):
    """One run of the alternation from a given start; returns (gs, ratio)."""
    proj = transform.matrix @ transform.pinv
    stall = _StallDetector()
    lam_boost = 1.0
    steps = 0
    u, s, vh, ratio = _svd_ratio(gs, r)

    def plain(u, s, vh):
        low = _low_rank_part(u, s, vh, r)
        out = np.tensordot(proj, low, axes=([1], [0]))
        return out / np.linalg.norm(out)

    while steps < cfg.max_iters:
        if ratio <= cfg.rank_tol:
            return gs, ratio, False
        if stall.update(ratio):
            return gs, ratio, True
        if ratio > _NEWTON_ENTRY:
            gs = plain(u, s, vh)
            steps += 1
            u, s, vh, ratio = _svd_ratio(gs, r)
            continue
        # Newton step: solve (I - P_range P_tangent P_range) d = -residual
        ptan = _tangent_projector(u, vh, r)

        def sandwich(x):
            y = np.tensordot(proj, x, axes=([1], [0]))
            y = ptan(y)
            return np.tensordot(proj, y, axes=([1], [0]))

        low = _low_rank_part(u, s, vh, r)
        residual = gs - np.tensordot(proj, low, axes=([1], [0]))
        lam = max(0.3 * ratio * lam_boost, 1e-9)
        delta = _damped_cg(lambda x: x - sandwich(x), -residual, lam, _CG_CAP)
        cand = gs + delta
        cand /= np.linalg.norm(cand)
        u2, s2, vh2, ratio2 = _svd_ratio(cand, r)
        steps += 1
        if ratio2 < ratio:
            gs, u, s, vh, ratio = cand, u2, s2, vh2, ratio2
            lam_boost = max(lam_boost / 3.0, 1.0)
        else:
            lam_boost *= 10.0
            gs = plain(u, s, vh)
            steps += 1
            u, s, vh, ratio = _svd_ratio(gs, r)
    return gs, ratio, False


def gen_single(transform: LinearTransform, dims, r: int,
               cfg: GeneratorConfig | None = None,
               real: bool = False) -> Tensor3:
    """Random M with rank(T(M)) = r and unit transform-domain energy.

    The working state is the transformed tensor G = T(M): each pass truncates
    G to its top-r tubes, pulls the result through T and back (projecting onto
    T's column space so a preimage exists), and rescales so ||G||_F = 1. The
    returned M is the least-squares preimage of the final G.

    With ``real`` the initial draw is real Gaussian; when the transform keeps
    the preimage real (real matrices, or conjugate-symmetric ones like the
    DFT) the output then carries real_hint. Stalled attempts restart from
    fresh draws (same stream) a few times before raising GeneratorError with
    the per-attempt closing ratios.
    """
    cfg = GeneratorConfig() if cfg is None else cfg
    _check_dims(dims, transform, r)
    rng = np.random.default_rng(cfg.seed)
    attempt_ratios = []

    for _ in range(1 + _MAX_RESTARTS):
        m0 = _unstack(_initial(rng, dims, real), real_hint=real)
        gs = np.ascontiguousarray(np.moveaxis(transform.apply(m0).data, 2, 0))
        gs /= np.linalg.norm(gs)
        gs, ratio, stalled = _single_attempt(transform, gs, r, cfg)
        if ratio <= cfg.rank_tol:
            m = transform.pinv_apply(_unstack(gs))
            return _maybe_real(m, real)
        attempt_ratios.append(ratio)
        if not stalled:
            break

    raise GeneratorError(
        f"rank-{r} target not reached after {len(attempt_ratios)} attempt(s); "
        f"closing tube-norm ratios {attempt_ratios}",
        ratios=tuple(attempt_ratios))


def _double_attempt(t1, r1, t2, r2, ms, cfg):
    """Alternating pair of projections on M itself, with joint polish."""
    mats = ((t1.matrix, t1.pinv, r1), (t2.matrix, t2.pinv, r2))
    stall = _StallDetector()
    lam_boost = 1.0
    steps = 0

    def tdot(mat, x):
        return np.tensordot(mat, x, axes=([1], [0]))

    def analyze(m):
        infos = []
        for tm, tp, r in mats:
            infos.append(_svd_ratio(tdot(tm, m), r))
        return infos

    def half(m, which, info):
        tm, tp, r = mats[which]
        u, s, vh, _ = info
        out = tdot(tp, _low_rank_part(u, s, vh, r))
        return out / np.linalg.norm(out)

    infos = analyze(ms)
    while steps < cfg.max_iters:
        worst = max(infos[0][3], infos[1][3])
        if worst <= cfg.rank_tol:
            return ms, (infos[0][3], infos[1][3]), False
        if stall.update(worst):
            return ms, (infos[0][3], infos[1][3]), True
        if worst > _NEWTON_ENTRY:
            ms = half(ms, 0, infos[0])
            infos = analyze(ms)
            ms = half(ms, 1, infos[1])
            infos = analyze(ms)
            steps += 1
            continue
        # Gauss-Newton on the stacked half-pass residuals
        ops = []
        rhs = np.zeros_like(ms)
        for which, (tm, tp, r) in enumerate(mats):
            u, s, vh, _ = infos[which]
            ptan = _tangent_projector(u, vh, r)
            tmh, tph = tm.conj().T, tp.conj().T

            def jmv(x, tm=tm, tp=tp, ptan=ptan):
                return x - tdot(tp, ptan(tdot(tm, x)))

            def jhmv(x, tmh=tmh, tph=tph, ptan=ptan):
                return x - tdot(tmh, ptan(tdot(tph, x)))

            fres = ms - tdot(tp, _low_rank_part(u, s, vh, r))
            rhs -= jhmv(fres)
            ops.append((jmv, jhmv))

        def normal_op(x):
            acc = np.zeros_like(x)
            for jmv, jhmv in ops:
                acc += jhmv(jmv(x))
            return acc

        lam = max(0.3 * worst * lam_boost, 1e-9)
        delta = _damped_cg(normal_op, rhs, lam, _CG_CAP)
        cand = ms + delta
        cand /= np.linalg.norm(cand)
        cand_infos = analyze(cand)
        steps += 1
        if max(cand_infos[0][3], cand_infos[1][3]) < worst:
            ms, infos = cand, cand_infos
            lam_boost = max(lam_boost / 3.0, 1.0)
        else:
            lam_boost *= 10.0
            ms = half(ms, 0, infos[0])
            infos = analyze(ms)
            ms = half(ms, 1, infos[1])
            infos = analyze(ms)
            steps += 1
    return ms, (infos[0][3], infos[1][3]), False


def gen_double(t1: LinearTransform, r1: int, t2: LinearTransform, r2: int,
               dims, cfg: GeneratorConfig | None = None,
               real: bool = False) -> Tensor3:
    """Random M with rank(T1(M)) = r1 and rank(T2(M)) = r2, ||M||_F = 1.

    The working state is M itself: each pass truncates T1(M) to r1 tubes,
    pulls back through T1's pseudo-inverse, renormalizes M, then repeats for
    T2. Convergence requires both tube-norm ratios at or below rank_tol for
    the same iterate. Incompatible rank pairs stall and eventually raise
    GeneratorError carrying both closing ratios.
    """
    cfg = GeneratorConfig() if cfg is None else cfg
    _check_dims(dims, t1, r1)
    _check_dims(dims, t2, r2)
    rng = np.random.default_rng(cfg.seed)
    attempt_ratios = []

    for _ in range(1 + _MAX_RESTARTS):
        ms = _initial(rng, dims, real)
        ms /= np.linalg.norm(ms)
        ms, ratios, stalled = _double_attempt(t1, r1, t2, r2, ms, cfg)
        if max(ratios) <= cfg.rank_tol:
            return _maybe_real(_unstack(ms), real)
        attempt_ratios.append(ratios)
        if not stalled:
            break

    raise GeneratorError(
        f"rank pair ({r1}, {r2}) not reached after {len(attempt_ratios)} "
        f"attempt(s); closing tube-norm ratio pairs {attempt_ratios}",
        ratios=tuple(attempt_ratios))


def bernoulli_mask(dims, p: float, seed: int):
    """Independent Ber(p) observation mask over all entries, seeded.

    p must lie in (0, 1]; the realized rate is whatever the draw produced.
    """
    from .solver import SamplingMask

    if len(dims) != 3 or any(int(d) <= 0 for d in dims):
        raise ShapeError(f"dims must be three positive integers, got {dims}")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"sampling rate must lie in (0, 1], got {p}")
    rng = np.random.default_rng(seed)
    keep = rng.random(tuple(int(d) for d in dims)) < p
    return SamplingMask.from_bool(keep)
