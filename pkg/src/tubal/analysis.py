"""Incoherence diagnostics, sampling-rate bound, phase experiments, metrics.

The completion guarantee is driven by how evenly the energy of the singular
tensors of T(X) spreads over the row, column, and tube bases. ``incoherence``
measures that spread: ``mu`` rescales the worst row or column basis energy,
``nu`` does the same for basis tubes pushed through the transform, and
``lam`` is the larger of the two. ``sampling_bound`` turns those parameters
into the sampling-rate expression they certify, and
``projected_basis_bound_check`` verifies the projected-basis norm bound that
links ``nu`` to the solver analysis.

``phase_experiment`` runs the seeded generate/mask/complete grid behind the
phase diagrams, and the metric helpers (psnr, ssim, rel_error and their
per-slice means) score recovered tensors.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, ShapeError
from .generators import GeneratorConfig, GeneratorError, bernoulli_mask, gen_double, gen_single
from .solver import SolverConfig, admm_complete, mask_project
from .tensor import Tensor3, TSvdFactors, _wrap, t_svd
from .transforms import LinearTransform

__all__ = [
    "IncoherenceReport",
    "PhaseCell",
    "MetricsReport",
    "project_S",
    "project_S_perp",
    "incoherence",
    "sampling_bound",
    "projected_basis_bound_check",
    "phase_experiment",
    "psnr",
    "ssim",
    "mpsnr",
    "mssim",
    "rel_error",
    "metrics_report",
    "SUCCESS_REL_ERROR",
]

SUCCESS_REL_ERROR = 1e-3


@dataclass(frozen=True)
class IncoherenceReport:
    """Energy-spread parameters of the singular tensors of a transformed tensor.

    ``per_basis_max`` holds the four per-inequality tight constants in order
    (row basis, column basis, row basis with transformed tube, column basis
    with transformed tube); ``mu`` is the max of the first two, ``nu`` the max
    of the last two, and ``lam`` = max(mu, nu) enters the sampling bound.
    """

    mu: float
    nu: float
    lam: float
    r: int
    per_basis_max: tuple

    def __post_init__(self):
        if self.mu <= 0 or self.nu <= 0:
            raise DomainError("incoherence parameters must be positive")


@dataclass(frozen=True)
class PhaseCell:
    """One (rank, sampling rate) cell of a phase experiment.

    ``r2`` is None for single-transform cells. Trials that die inside the
    generator are counted in ``gen_failures`` and score as non-successes.
    """

    r: int
    p: float
    trials: int
    successes: int
    r2: int | None = None
    gen_failures: int = 0

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise DomainError("successes must lie in [0, trials]")


@dataclass(frozen=True)
class MetricsReport:
    """Bundle of recovery quality scores for one (reference, test) pair."""

    psnr: float
    ssim: float
    mpsnr: float
    mssim: float
    rel_error: float


def _stack(t: Tensor3) -> np.ndarray:
    return np.moveaxis(t.data, 2, 0)


def _factor_slices(u):
    if isinstance(u, Tensor3):
        return _stack(u)
    return _stack(u.u)


def project_S(z: Tensor3, u: Tensor3, v: Tensor3) -> Tensor3:
    """Project onto the span of the singular tensors: U*U^H*Z + Z*V*V^H - U*U^H*Z*V*V^H.

    U and V are skinny factors with orthonormal columns in every slice; the
    projection acts slice by slice.
    """
    zs = _stack(z)
    us, vs = _stack(u), _stack(v)
    if us.shape[1] != zs.shape[1] or vs.shape[1] != zs.shape[2] \
            or us.shape[0] != zs.shape[0] or vs.shape[0] != zs.shape[0]:
        raise ShapeError(
            f"projector factors {u.dims} / {v.dims} do not fit tensor {z.dims}")
    uh_z = np.conj(us).transpose(0, 2, 1) @ zs
    left = us @ uh_z
    z_v = (zs - left) @ vs
    right = z_v @ np.conj(vs).transpose(0, 2, 1)
    return _wrap(np.moveaxis(left + right, 0, 2))


def project_S_perp(z: Tensor3, u: Tensor3, v: Tensor3) -> Tensor3:
    """Complement of ``project_S``: (I - U*U^H) * Z * (I - V*V^H)."""
    return _wrap(z.data - project_S(z, u, v).data)


def _row_energies(factor_slices: np.ndarray) -> np.ndarray:
    # (N3, n, r) stacked slices -> (n, N3) total squared row norms
    return np.sum(np.abs(factor_slices) ** 2, axis=2).T


def incoherence(tx: Tensor3, r: int, transform: LinearTransform) -> IncoherenceReport:
    """Tight energy-spread parameters of the rank-r singular tensors of ``tx``.

    ``tx`` lives in the transform domain (third dim N3). Each of the four
    basis inequalities gets its smallest admissible constant; see
    ``IncoherenceReport`` for how they combine into mu, nu, lam.
    """
    n1, n2, big_n3 = tx.dims
    if big_n3 != transform.N3:
        raise ShapeError(
            f"tensor third dim {big_n3} does not match transform rows {transform.N3}")
    if r < 1 or r > min(n1, n2):
        raise DomainError(f"rank {r} outside [1, {min(n1, n2)}]")
    factors = t_svd(tx).truncate(r)
    energy_u = _row_energies(_stack(factors.u))
    energy_v = _row_energies(_stack(factors.v))

    mu_rows = float(np.max(energy_u.sum(axis=1))) * n1 / (r * big_n3)
    mu_cols = float(np.max(energy_v.sum(axis=1))) * n2 / (r * big_n3)

    # the transformed tube basis scales slice m by T[m, k], so the coupled
    # energies are plain matrix products against |T|^2
    weights = np.abs(transform.matrix) ** 2
    norm_sq = transform.one_to_two ** 2
    nu_rows = float(np.max(energy_u @ weights)) * n1 / (r * norm_sq)
    nu_cols = float(np.max(energy_v @ weights)) * n2 / (r * norm_sq)

    mu = max(mu_rows, mu_cols)
    nu = max(nu_rows, nu_cols)
    return IncoherenceReport(mu=mu, nu=nu, lam=max(mu, nu), r=r,
                             per_basis_max=(mu_rows, mu_cols, nu_rows, nu_cols))


def sampling_bound(transform: LinearTransform, lam: float, r: int,
                   n1: int, n2: int, c0: float = 1.0) -> float:
    """Sampling-rate expression certified by the incoherence parameters.

    Returns c0 * (kappa^2 + rho^2) * lam * r * (n1+n2) / (n1*n2)
    * log^2(kappa * (n1+n2) * N3) with the natural logarithm. The raw value
    is returned; clip to [0, 1] when quoting it as a sampling rate.
    """
    if lam <= 0 or r <= 0 or n1 <= 0 or n2 <= 0 or c0 <= 0:
        raise DomainError("sampling_bound requires positive inputs")
    kappa, rho = transform.kappa, transform.rho
    log_term = np.log(kappa * (n1 + n2) * transform.N3)
    return float(c0 * (kappa ** 2 + rho ** 2) * lam * r * (n1 + n2)
                 / (n1 * n2) * log_term ** 2)


def projected_basis_bound_check(factors: TSvdFactors, transform: LinearTransform,
                                nu: float, tol: float = 1e-10) -> bool:
    """Check the projected-basis norm bound for every original-domain basis tensor.

    For each (i, j, k) the squared Frobenius norm of the projected transformed
    basis tensor must not exceed nu * r * (n1+n2) / (n1*n2) times the squared
    max-column-norm of the transform. The slice structure of a transformed
    basis tensor reduces every norm to row energies of the factors, so the
    check is exhaustive but vectorized.
    """
    us, vs = _stack(factors.u), _stack(factors.v)
    n1, n2 = us.shape[1], vs.shape[1]
    r = us.shape[2]
    energy_u = _row_energies(us)
    energy_v = _row_energies(vs)
    weights = np.abs(transform.matrix) ** 2
    # slice m of the projected basis tensor has squared norm
    # |T[m,k]|^2 * (a + b - a*b) with a, b the row energies at slice m
    vals = (energy_u @ weights)[:, None, :] + (energy_v @ weights)[None, :, :] \
        - np.einsum("im,jm,mk->ijk", energy_u, energy_v, weights)
    bound = nu * r * (n1 + n2) / (n1 * n2) * transform.one_to_two ** 2
    return bool(np.all(vals <= bound + tol))


def _cell_seeds(master_seed, r, r2, p, trial):
    entropy = (int(master_seed), int(r), int(r2), int(round(p * 1e9)), int(trial))
    state = np.random.SeedSequence(entropy).generate_state(2)
    return int(state[0]), int(state[1])


def phase_experiment(dims, transform_spec, ranks, rates, trials: int = 10,
                     seed: int = 0, cfg: GeneratorConfig | None = None,
                     solver_cfg: SolverConfig | None = None):
    """Seeded success-count grid over (rank, sampling rate) cells.

    ``transform_spec`` is either one LinearTransform (single-transform ground
    truths) or a pair (both transforms constrain the ground truth; completion
    solves under the first). ``ranks`` holds ints in the single case and
    (r1, r2) pairs otherwise. Per-cell seeds derive from (seed, rank, rate,
    trial), so the grid is reproducible cell by cell and trial by trial.
    A trial succeeds when the relative error is at most 1e-3.
    """
    if cfg is None:
        cfg = GeneratorConfig()
    double = isinstance(transform_spec, (tuple, list))
    if double:
        t1, t2 = transform_spec
    else:
        t1 = transform_spec
    cells = []
    for rank in ranks:
        if double:
            r1, r2 = rank
        else:
            r1, r2 = int(rank), 0
        for p in rates:
            if not 0.0 < p <= 1.0:
                raise DomainError(f"sampling rate {p} outside (0, 1]")
            successes = 0
            gen_failures = 0
            for trial in range(trials):
                gen_seed, mask_seed = _cell_seeds(seed, r1, r2, p, trial)
                trial_cfg = dataclasses.replace(cfg, seed=gen_seed)
                try:
                    if double:
                        truth = gen_double(t1, r1, t2, r2, dims, trial_cfg)
                    else:
                        truth = gen_single(t1, dims, r1, trial_cfg)
                except GeneratorError:
                    gen_failures += 1
                    continue
                mask = bernoulli_mask(dims, p, seed=mask_seed)
                recovered, _ = admm_complete(mask_project(truth, mask), mask,
                                             t1, solver_cfg)
                if rel_error(truth, recovered) <= SUCCESS_REL_ERROR:
                    successes += 1
            cells.append(PhaseCell(r=r1, p=float(p), trials=trials,
                                   successes=successes,
                                   r2=r2 if double else None,
                                   gen_failures=gen_failures))
    return cells


def _real_parts(ref: Tensor3, test: Tensor3):
    if ref.dims != test.dims:
        raise ShapeError(f"metric operands differ in dims: {ref.dims} vs {test.dims}")
    return ref.data.real, test.data.real


def psnr(ref: Tensor3, test: Tensor3, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB over all entries; +inf when identical."""
    a, b = _real_parts(ref, test)
    err = float(np.sum((a - b) ** 2))
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak ** 2 * a.size / err))


def _ssim_window(n1: int, n2: int) -> np.ndarray:
    side = min(11, n1, n2)
    if side % 2 == 0:
        side -= 1
    half = (side - 1) / 2.0
    coords = np.arange(side) - half
    g = np.exp(-coords ** 2 / (2.0 * 1.5 ** 2))
    window = np.outer(g, g)
    return window / window.sum()


def _ssim_map(a: np.ndarray, b: np.ndarray, window: np.ndarray, peak: float):
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    mu_a = fftconvolve(a, window, mode="valid")
    mu_b = fftconvolve(b, window, mode="valid")
    var_a = fftconvolve(a * a, window, mode="valid") - mu_a ** 2
    var_b = fftconvolve(b * b, window, mode="valid") - mu_b ** 2
    cov = fftconvolve(a * b, window, mode="valid") - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(ref: Tensor3, test: Tensor3, peak: float = 1.0) -> float:
    """Mean structural similarity over all local windows of all frontal slices.

    Gaussian 11x11 window with sigma 1.5 (shrunk to fit small slices),
    stabilizer constants (0.01*peak)^2 and (0.03*peak)^2.
    """
    a, b = _real_parts(ref, test)
    window = _ssim_window(a.shape[0], a.shape[1])
    vals = [_ssim_map(a[:, :, k], b[:, :, k], window, peak)
            for k in range(a.shape[2])]
    return float(np.mean(np.stack(vals)))


def mpsnr(ref: Tensor3, test: Tensor3, peak: float = 1.0) -> float:
    """Mean of per-frontal-slice PSNR values."""
    a, b = _real_parts(ref, test)
    per_slice = []
    for k in range(a.shape[2]):
        err = float(np.sum((a[:, :, k] - b[:, :, k]) ** 2))
        if err == 0.0:
            per_slice.append(float("inf"))
        else:
            per_slice.append(10.0 * np.log10(peak ** 2 * a[:, :, k].size / err))
    return float(np.mean(per_slice))


def mssim(ref: Tensor3, test: Tensor3, peak: float = 1.0) -> float:
    """Mean of per-frontal-slice SSIM values."""
    a, b = _real_parts(ref, test)
    window = _ssim_window(a.shape[0], a.shape[1])
    per_slice = [float(np.mean(_ssim_map(a[:, :, k], b[:, :, k], window, peak)))
                 for k in range(a.shape[2])]
    return float(np.mean(per_slice))


def rel_error(ref: Tensor3, test: Tensor3) -> float:
    """Relative Frobenius error of ``test`` against ``ref`` on the full complex data."""
    if ref.dims != test.dims:
        raise ShapeError(f"metric operands differ in dims: {ref.dims} vs {test.dims}")
    denom = float(np.linalg.norm(ref.data))
    if denom == 0.0:
        raise DomainError("rel_error undefined for an all-zero reference")
    return float(np.linalg.norm(test.data - ref.data)) / denom


def metrics_report(ref: Tensor3, test: Tensor3, peak: float = 1.0) -> MetricsReport:
    """All quality scores for one pair, sharing a single peak value."""
    return MetricsReport(psnr=psnr(ref, test, peak),
                         ssim=ssim(ref, test, peak),
                         mpsnr=mpsnr(ref, test, peak),
                         mssim=mssim(ref, test, peak),
                         rel_error=rel_error(ref, test))
