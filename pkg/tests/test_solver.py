import numpy as np
import pytest

import oracles
from tubal.errors import DomainError, ShapeError
from tubal.solver import (
    SamplingMask,
    SolverConfig,
    admm_complete,
    mask_project,
    penalty_update,
    svt,
    x_update,
    y_update,
    z_update,
)
from tubal.tensor import Tensor3, fro_norm, inf_norm, nuclear_norm
from tubal.transforms import LinearTransform, dct_transform, dft_transform


def rand_t(rng, n1, n2, n3):
    return Tensor3(oracles.random_complex(rng, (n1, n2, n3)))


def low_transform_rank(rng, transform, n1, n2, r):
    """M whose transform-domain image has tubal rank r (square transform)."""
    tx = oracles.random_tubal_rank(rng, n1, n2, transform.N3, r)
    m = transform.pinv_apply(Tensor3(tx))
    return m


def objective(x, a, tau):
    return tau * nuclear_norm(x) + 0.5 * fro_norm(x - a) ** 2


def test_sampling_mask_basics():
    m = SamplingMask((2, 3, 2), [[1, 2, 1], [0, 0, 0], [1, 0, 1]])
    assert np.array_equal(m.indices,
                          [[0, 0, 0], [1, 0, 1], [1, 2, 1]])  # sorted lex
    assert m.count == 3
    assert m.rate == 3 / 12
    ba = m.bool_array()
    assert ba.sum() == 3 and ba[1, 2, 1] and ba[0, 0, 0] and ba[1, 0, 1]
    rt = SamplingMask.from_bool(ba)
    assert np.array_equal(rt.indices, m.indices)
    with pytest.raises(DomainError):
        SamplingMask((2, 3, 2), [[0, 0, 0], [0, 0, 0]])
    with pytest.raises(DomainError):
        SamplingMask((2, 3, 2), [[0, 3, 0]])
    with pytest.raises(DomainError):
        SamplingMask((2, 3, 2), [[-1, 0, 0]])
    with pytest.raises(ShapeError):
        SamplingMask((2, 3), [[0, 0]])
    empty = SamplingMask((2, 2, 2), np.zeros((0, 3)))
    assert empty.count == 0 and empty.rate == 0.0


def test_mask_project():
    rng = np.random.default_rng(0)
    a = rand_t(rng, 3, 3, 2)
    mask = SamplingMask((3, 3, 2), [[0, 0, 0], [2, 1, 1]])
    p = mask_project(a, mask)
    assert p.data[0, 0, 0] == a.data[0, 0, 0]
    assert p.data[2, 1, 1] == a.data[2, 1, 1]
    assert np.count_nonzero(p.data) == 2
    with pytest.raises(ShapeError):
        mask_project(rand_t(rng, 2, 2, 2), mask)


def test_svt_basic():
    rng = np.random.default_rng(1)
    a = rand_t(rng, 4, 3, 3)
    assert fro_norm(svt(a, 0.0) - a) <= 1e-12 * fro_norm(a)
    diag = np.zeros((2, 2, 1), dtype=complex)
    diag[0, 0, 0], diag[1, 1, 0] = 3.0, 1.0
    out = svt(Tensor3(diag), 2.0)
    assert np.allclose(out.data[:, :, 0], np.diag([1.0, 0.0]), atol=1e-12)
    with pytest.raises(DomainError):
        svt(a, -0.5)


def test_svt_matches_per_slice_oracle():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a = rand_t(rng, 4, 4, 3)
        for tau in (0.1, 1.0, 10.0):
            ref = oracles.matrix_svt(a.data, tau)
            assert np.max(np.abs(svt(a, tau).data - ref)) <= 1e-10


def test_svt_proximal_optimality():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rand_t(rng, 4, 4, 3)
        for tau in (0.1, 1.0, 10.0):
            x = svt(a, tau)
            base = objective(x, a, tau)
            for _ in range(100):
                delta = oracles.random_complex(rng, (4, 4, 3))
                delta *= 0.1 * rng.random() / np.linalg.norm(delta)
                pert = Tensor3(x.data + delta)
                assert base <= objective(pert, a, tau) + 1e-9


def test_y_update():
    rng = np.random.default_rng(4)
    t = dft_transform(4)
    x = rand_t(rng, 5, 4, 4)
    z = rand_t(rng, 5, 4, 4)
    alpha = 0.7
    hand = svt(Tensor3(t.apply(x).data + z.data / alpha), 1.0 / alpha)
    got = y_update(x, z, alpha, t)
    assert np.max(np.abs(got.data - hand.data)) <= 1e-12
    big = y_update(x, z, 1e12, t)
    assert inf_norm(big - t.apply(x)) <= 1e-10
    with pytest.raises(DomainError):
        y_update(x, z, 0.0, t)


def test_x_update():
    rng = np.random.default_rng(5)
    t = dct_transform(4)
    m = rand_t(rng, 5, 4, 4)
    y = rand_t(rng, 5, 4, 4)
    z = rand_t(rng, 5, 4, 4)
    alpha = 1.3
    full = SamplingMask.from_bool(np.ones((5, 4, 4), dtype=bool))
    assert np.array_equal(x_update(y, z, alpha, full, m, t).data, m.data)
    mask = SamplingMask.from_bool(np.random.default_rng(6).random((5, 4, 4)) < 0.4)
    got = x_update(y, z, alpha, mask, m, t)
    mb = mask.bool_array()
    assert np.array_equal(got.data[mb], m.data[mb])  # bit-exact on observed
    # independent adjoint path: DCT is real orthonormal, so pinv = transpose
    pull = oracles.tube_matvec_mode3(y.data - z.data / alpha,
                                     t.matrix.conj().T)
    assert np.max(np.abs(got.data[~mb] - pull[~mb])) <= 1e-12


def test_z_update():
    rng = np.random.default_rng(7)
    t = dft_transform(3)
    x = rand_t(rng, 4, 4, 3)
    y = t.apply(x)
    # T(X) = Y leaves any Z unchanged
    z0 = rand_t(rng, 4, 4, 3)
    assert np.allclose(z_update(z0, 2.0, x, y, t).data, z0.data, atol=1e-12)
    y2 = rand_t(rng, 4, 4, 3)
    one = z_update(Tensor3(np.zeros((4, 4, 3))), 1.0, x, y2, t)
    assert np.allclose(one.data, t.apply(x).data - y2.data, atol=1e-12)
    twice = z_update(one, 1.0, x, y2, t)
    assert np.allclose(twice.data, 2 * one.data, atol=1e-12)


def test_penalty_update():
    cfg = SolverConfig(alpha0=1e-2, alpha_max=1e6, rho_growth=1.02)
    assert penalty_update(1e6, cfg) == 1e6
    flat = SolverConfig(rho_growth=1.0)
    assert penalty_update(0.37, flat) == 0.37
    alpha = cfg.alpha0
    for k in range(1, 40):
        alpha = penalty_update(alpha, cfg)
        assert alpha == pytest.approx(min(1e-2 * 1.02 ** k, 1e6), rel=1e-12)


def test_solver_config_validation():
    for bad in (dict(alpha0=0.0), dict(alpha_max=1e-3), dict(rho_growth=0.9),
                dict(tol=0.0), dict(max_iters=0)):
        with pytest.raises(DomainError):
            SolverConfig(**bad)


def test_admm_input_validation():
    rng = np.random.default_rng(8)
    m = rand_t(rng, 4, 4, 3)
    t = dft_transform(3)
    empty = SamplingMask((4, 4, 3), np.zeros((0, 3)))
    with pytest.raises(DomainError):
        admm_complete(m, empty, t)
    wrong = SamplingMask.from_bool(np.ones((4, 4, 2), dtype=bool))
    with pytest.raises(ShapeError):
        admm_complete(m, wrong, t)
    full = SamplingMask.from_bool(np.ones((4, 4, 3), dtype=bool))
    with pytest.raises(ShapeError):
        admm_complete(m, full, dft_transform(4))


def test_admm_full_mask_returns_data():
    rng = np.random.default_rng(9)
    m = rand_t(rng, 6, 5, 4)
    t = dft_transform(4)
    full = SamplingMask.from_bool(np.ones((6, 5, 4), dtype=bool))
    x, report = admm_complete(m, full, t)
    assert np.array_equal(x.data, m.data)
    assert report.converged
    assert report.final_residual <= SolverConfig().tol


def test_admm_exact_recovery_small():
    rng = np.random.default_rng(10)
    t = dft_transform(6)
    m = low_transform_rank(rng, t, 16, 16, 2)
    mask = SamplingMask.from_bool(np.random.default_rng(11).random((16, 16, 6)) < 0.7)
    seen = []

    def check(iteration, x, stat):
        mb = mask.bool_array()
        seen.append(np.array_equal(x.data[mb], m.data[mb]))

    x, report = admm_complete(m, mask, t, on_iterate=check)
    assert report.converged
    assert fro_norm(x - m) / fro_norm(m) <= 1e-3
    assert report.final_residual <= 1e-10
    assert report.objective > 0
    assert all(seen) and len(seen) == report.iterations
    # determinism
    x2, report2 = admm_complete(m, mask, t)
    assert np.array_equal(x.data, x2.data)
    assert report2.iterations == report.iterations
    assert report2.final_residual == report.final_residual


def test_admm_non_convergence_reported():
    rng = np.random.default_rng(12)
    t = dft_transform(5)
    m = rand_t(rng, 8, 8, 5)
    mask = SamplingMask.from_bool(np.random.default_rng(13).random((8, 8, 5)) < 0.5)
    cfg = SolverConfig(max_iters=5)
    x, report = admm_complete(m, mask, t, cfg=cfg, record_history=True)
    assert not report.converged
    assert report.iterations == 5
    assert report.final_residual > cfg.tol
    assert len(report.history) == 5
    assert all(len(h) == 2 for h in report.history)


def test_admm_ignores_unobserved_entries():
    rng = np.random.default_rng(14)
    t = dft_transform(4)
    m = low_transform_rank(rng, t, 10, 10, 1)
    mask = SamplingMask.from_bool(np.random.default_rng(15).random((10, 10, 4)) < 0.6)
    mb = mask.bool_array()
    junk = m.data.copy()
    junk[~mb] = 123.456 + 7.0j
    x1, r1 = admm_complete(m, mask, t)
    x2, r2 = admm_complete(Tensor3(junk), mask, t)
    assert np.array_equal(x1.data, x2.data)
    assert r1.iterations == r2.iterations


def test_admm_real_hint_output():
    rng = np.random.default_rng(16)
    t = dct_transform(4)
    tx = oracles.random_tubal_rank(rng, 8, 8, 4, 1)
    m_data = t.pinv_apply(Tensor3(tx.real)).data.real
    m = Tensor3(m_data, real_hint=True)
    mask = SamplingMask.from_bool(np.random.default_rng(17).random((8, 8, 4)) < 0.8)
    x, report = admm_complete(m, mask, t)
    assert x.real_hint
    assert np.all(x.data.imag == 0.0)
    assert report.imag_residue is not None and report.imag_residue <= 1e-8
