"""Naive reference implementations used to cross-check the library.

Everything here is deliberately written as plain loops over slices and
entries, or routed through a different LAPACK driver than the library uses
(gesvd instead of gesdd). Slow but obviously correct.
"""

import numpy as np
import scipy.linalg


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def slice_product(a, b):
    """Slice-by-slice matrix product via an entrywise triple loop."""
    n1, n2, n3 = a.shape
    l = b.shape[1]
    c = np.zeros((n1, l, n3), dtype=np.complex128)
    for k in range(n3):
        for i in range(n1):
            for j in range(l):
                acc = 0.0 + 0.0j
                for t in range(n2):
                    acc += a[i, t, k] * b[t, j, k]
                c[i, j, k] = acc
    return c


def slice_conj_transpose(a):
    n1, n2, n3 = a.shape
    out = np.zeros((n2, n1, n3), dtype=np.complex128)
    for k in range(n3):
        for i in range(n1):
            for j in range(n2):
                out[j, i, k] = np.conj(a[i, j, k])
    return out


def slice_singular_values(a):
    """Per-slice singular values through scipy's gesvd driver."""
    n1, n2, n3 = a.shape
    s = np.zeros((min(n1, n2), n3))
    for k in range(n3):
        s[:, k] = scipy.linalg.svd(a[:, :, k], compute_uv=False,
                                   lapack_driver="gesvd")
    return s


def power_iteration_2norm(mat, iters=2000, seed=0):
    """Largest singular value of one matrix by power iteration on matH mat."""
    rng = np.random.default_rng(seed)
    h = mat.conj().T @ mat
    v = random_complex(rng, mat.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = h @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.real(np.vdot(v, h @ v))))


def naive_fro(a):
    acc = 0.0
    for x in a.ravel():
        acc += (x.real * x.real + x.imag * x.imag)
    return float(np.sqrt(acc))


def naive_inf(a):
    best = 0.0
    for x in a.ravel():
        best = max(best, abs(x))
    return float(best)


def naive_inf2(a):
    """Largest l2 norm over row fibers (i,:,:) and column fibers (:,j,:)."""
    n1, n2, n3 = a.shape
    best = 0.0
    for i in range(n1):
        best = max(best, float(np.sqrt(np.sum(np.abs(a[i, :, :]) ** 2))))
    for j in range(n2):
        best = max(best, float(np.sqrt(np.sum(np.abs(a[:, j, :]) ** 2))))
    return best


def naive_inner(a, b):
    acc = 0.0 + 0.0j
    for x, y in zip(a.ravel(), b.ravel()):
        acc += np.conj(x) * y
    return complex(acc)


def tube_matvec_mode3(a, t):
    """mode-3 product computed tube by tube."""
    n1, n2, n3 = a.shape
    big = t.shape[0]
    out = np.zeros((n1, n2, big), dtype=np.complex128)
    for i in range(n1):
        for j in range(n2):
            out[i, j, :] = t @ a[i, j, :]
    return out


def matrix_svt(a, tau):
    """Per-slice singular value shrinkage through scipy's gesvd driver."""
    out = np.zeros_like(a, dtype=np.complex128)
    for k in range(a.shape[2]):
        u, s, vh = scipy.linalg.svd(a[:, :, k], full_matrices=False,
                                    lapack_driver="gesvd")
        out[:, :, k] = (u * np.maximum(s - tau, 0.0)) @ vh
    return out


def naive_nuclear(a):
    return float(np.sum(slice_singular_values(a)))


def naive_spectral(a):
    return float(np.max(slice_singular_values(a)))


def naive_psnr(ref, test, peak):
    """Two-pass loop PSNR: count entries, then accumulate squared error."""
    n = 0
    for _ in ref.ravel():
        n += 1
    acc = 0.0
    for x, y in zip(ref.ravel(), test.ravel()):
        d = x - y
        acc += (d.real * d.real + d.imag * d.imag)
    if acc == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak * peak * n / acc))


def basis_column(n, i, n3):
    """Column basis tensor: every slice equals e_i (n x 1)."""
    out = np.zeros((n, 1, n3), dtype=np.complex128)
    out[i, 0, :] = 1.0
    return out


def basis_row(n, j, n3):
    """Row basis tensor: every slice equals e_j^T (1 x n)."""
    out = np.zeros((1, n, n3), dtype=np.complex128)
    out[0, j, :] = 1.0
    return out


def basis_tube(n3, k):
    """Tube basis tensor: 1 x 1 x n3 with a single 1 at slice k."""
    out = np.zeros((1, 1, n3), dtype=np.complex128)
    out[0, 0, k] = 1.0
    return out


def random_tubal_rank(rng, n1, n2, n3, r):
    """A random tensor of tubal rank at most r, built from skinny factors."""
    u = random_complex(rng, (n1, r, n3))
    v = random_complex(rng, (n2, r, n3))
    return slice_product(u, slice_conj_transpose(v))
