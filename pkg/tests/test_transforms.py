import numpy as np
import pytest
import scipy.linalg

import oracles
from tubal.errors import DomainError, ShapeError, SingularTransformError
from tubal.tensor import Tensor3, fro_norm
from tubal.transforms import (
    LinearTransform,
    concat_transforms,
    dct_transform,
    dft_transform,
    dwht_transform,
    pseudo_inverse,
    random_conditioned,
    random_unitary,
    slim_columns,
)


def rand_t(rng, n1, n2, n3):
    return Tensor3(oracles.random_complex(rng, (n1, n2, n3)))


def recompute_diagnostics(mat):
    s = scipy.linalg.svd(mat, compute_uv=False, lapack_driver="gesvd")
    pinv = scipy.linalg.pinv(mat)
    rho = mat.shape[0] * max(np.max(np.abs(mat)) ** 2, np.max(np.abs(pinv)) ** 2)
    one_to_two = np.sqrt(np.max(np.sum(np.abs(mat) ** 2, axis=0)))
    return s[0], s[-1], rho, one_to_two


def test_dft_transform():
    t1 = dft_transform(1)
    assert np.allclose(t1.matrix, [[1.0]])
    t = dft_transform(8)
    assert np.max(np.abs(t.matrix.conj().T @ t.matrix - np.eye(8))) <= 1e-12
    assert t.kappa == pytest.approx(1.0, abs=1e-10)
    assert t.rho == pytest.approx(1.0, abs=1e-10)
    assert t.one_to_two == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(DomainError):
        dft_transform(0)


def test_dct_transform():
    assert np.allclose(dct_transform(1).matrix, [[1.0]])
    t = dct_transform(6)
    assert np.max(np.abs(t.matrix.T @ t.matrix - np.eye(6))) <= 1e-12
    assert np.allclose(t.matrix[0, :], np.full(6, 1.0 / np.sqrt(6)))
    assert np.max(np.abs(t.matrix.imag)) == 0.0
    assert t.kappa == pytest.approx(1.0, abs=1e-10)


def test_dwht_transform():
    t2 = dwht_transform(2)
    assert np.allclose(t2.matrix.real,
                       np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    t4 = dwht_transform(4)
    assert np.max(np.abs(t4.matrix.T @ t4.matrix - np.eye(4))) <= 1e-12
    assert np.allclose(np.abs(t4.matrix), 0.5)
    for bad in (3, 6, 12):
        with pytest.raises(DomainError):
            dwht_transform(bad)
    assert dwht_transform(1).matrix[0, 0] == 1.0


def test_slim_columns():
    sq = slim_columns("dft", 8, 8)
    assert np.array_equal(sq.matrix, dft_transform(8).matrix)
    slim = slim_columns("dft", 16, 8)
    assert slim.matrix.shape == (16, 8)
    s = np.linalg.svd(slim.matrix, compute_uv=False)
    assert np.max(np.abs(s - 1.0)) <= 1e-12
    assert slim.kappa == pytest.approx(1.0, abs=1e-10)
    assert slim.rho == pytest.approx(1.0, abs=1e-10)
    assert np.array_equal(slim.matrix, dft_transform(16).matrix[:, :8])
    slim_dct = slim_columns("dct", 12, 6)
    assert np.array_equal(slim_dct.matrix, dct_transform(12).matrix[:, :6])
    with pytest.raises(DomainError):
        slim_columns("dft", 4, 8)
    with pytest.raises(DomainError):
        slim_columns("fourier", 8, 4)
    sru = slim_columns("random_unitary", 10, 5, seed=3)
    assert np.array_equal(sru.matrix, random_unitary(5, 10, seed=3).matrix)


def test_concat_transforms():
    n3 = 6
    c = concat_transforms(dft_transform(n3), dct_transform(n3))
    assert c.matrix.shape == (2 * n3, n3)
    assert np.array_equal(c.matrix[:n3, :], dft_transform(n3).matrix)
    assert np.array_equal(c.matrix[n3:, :], dct_transform(n3).matrix)
    smax, smin, rho, otw = recompute_diagnostics(c.matrix)
    assert c.sigma_max == pytest.approx(smax, abs=1e-10)
    assert c.sigma_min == pytest.approx(smin, abs=1e-10)
    assert c.rho == pytest.approx(rho, rel=1e-10)
    assert c.one_to_two == pytest.approx(otw, rel=1e-10)
    same = concat_transforms(dft_transform(4), np.zeros((0, 4)))
    assert np.array_equal(same.matrix, dft_transform(4).matrix)
    with pytest.raises(ShapeError):
        concat_transforms(dft_transform(4), dct_transform(5))


def test_random_unitary():
    t = random_unitary(8, seed=0)
    assert t.matrix.shape == (8, 8)
    assert t.kappa == pytest.approx(1.0, abs=1e-10)
    assert np.array_equal(t.matrix, random_unitary(8, seed=0).matrix)
    other = random_unitary(8, seed=1)
    assert np.linalg.norm(t.matrix - other.matrix) > 0.1
    tall = random_unitary(5, 9, seed=2)
    assert tall.matrix.shape == (9, 5)
    assert tall.is_isometry(1e-10)
    with pytest.raises(DomainError):
        random_unitary(5, 3)


def test_random_conditioned():
    flat = random_conditioned(6, seed=0, smin=1.0, smax=1.0)
    assert flat.kappa == pytest.approx(1.0, abs=1e-10)
    t = random_conditioned(10, seed=4, smin=0.5, smax=2.0)
    assert t.kappa <= 4.0 + 1e-10
    s = np.sort(np.linalg.svd(t.matrix, compute_uv=False))
    drawn = np.sort(np.random.default_rng(4).uniform(0.5, 2.0, size=10))
    assert np.max(np.abs(s - drawn)) <= 1e-10
    assert np.all(s >= 0.5 - 1e-10) and np.all(s <= 2.0 + 1e-10)
    with pytest.raises(DomainError):
        random_conditioned(5, smin=0.0, smax=1.0)
    with pytest.raises(DomainError):
        random_conditioned(5, smin=2.0, smax=0.5)
    tall = random_conditioned(4, seed=7, smin=0.5, smax=2.0, big_n3=6)
    assert tall.matrix.shape == (6, 4)
    assert tall.kappa <= 4.0 + 1e-10


def test_pseudo_inverse():
    rng = np.random.default_rng(5)
    q = random_unitary(4, 7, seed=5).matrix
    assert np.max(np.abs(pseudo_inverse(q) - q.conj().T)) <= 1e-12
    sq = oracles.random_complex(rng, (5, 5))
    pi = pseudo_inverse(sq)
    assert np.max(np.abs(pi @ sq - np.eye(5))) <= 1e-9
    assert np.max(np.abs(sq @ pi - np.eye(5))) <= 1e-9
    m = oracles.random_complex(rng, (6, 4))
    pm = pseudo_inverse(m)
    assert np.max(np.abs(m @ pm @ m - m)) <= 1e-10
    defective = np.ones((5, 3))
    with pytest.raises(SingularTransformError):
        pseudo_inverse(defective)


def test_from_matrix_invariants():
    rng = np.random.default_rng(6)
    m = oracles.random_complex(rng, (9, 5))
    t = LinearTransform.from_matrix(m, name="rand")
    assert np.max(np.abs(t.pinv @ t.matrix - np.eye(5))) <= 1e-10
    smax, smin, rho, otw = recompute_diagnostics(t.matrix)
    assert t.sigma_max == pytest.approx(smax, rel=1e-10)
    assert t.sigma_min == pytest.approx(smin, rel=1e-10)
    assert t.rho == pytest.approx(rho, rel=1e-10)
    assert t.one_to_two == pytest.approx(otw, rel=1e-10)
    assert t.kappa >= 1.0
    with pytest.raises(SingularTransformError):
        LinearTransform.from_matrix(oracles.random_complex(rng, (3, 5)))
    with pytest.raises(DomainError):
        LinearTransform.from_matrix(np.full((4, 4), np.nan))
    with pytest.raises(ShapeError):
        LinearTransform.from_matrix(np.zeros((3, 3, 3)))
    with pytest.raises(SingularTransformError):
        LinearTransform.from_matrix(np.ones((4, 2)))


def test_apply_and_pullback():
    rng = np.random.default_rng(7)
    a = rand_t(rng, 4, 3, 6)
    for t in (dft_transform(6), slim_columns("dct", 12, 6),
              random_conditioned(6, seed=1)):
        image = t.apply(a)
        assert image.dims == (4, 3, t.N3)
        back = t.pinv_apply(image)
        assert fro_norm(back - a) <= 1e-10 * fro_norm(a)
    ident = LinearTransform.from_matrix(np.eye(6), name="id")
    assert np.allclose(ident.apply(a).data, a.data, atol=1e-14)
    t1, t2 = dft_transform(6), dct_transform(6)
    c = concat_transforms(t1, t2)
    stacked = c.apply(a)
    assert np.max(np.abs(stacked.data[:, :, :6] - t1.apply(a).data)) <= 1e-12
    assert np.max(np.abs(stacked.data[:, :, 6:] - t2.apply(a).data)) <= 1e-12
    # isometry subclass preserves the Frobenius norm
    iso = random_unitary(6, 12, seed=9)
    assert fro_norm(iso.apply(a)) == pytest.approx(fro_norm(a), rel=1e-10)
    with pytest.raises(ShapeError):
        dft_transform(5).apply(a)
