# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: cyclic Jacobi Hermitian eigensolver, pairwise
log-distance sums and the Leja score update.

Function-for-function twin of degenex._kernels.pyback; selected at import
time by degenex._kernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt, log, hypot

cnp.import_array()

DEF SWEEP_LIMIT = 60


cdef int _jacobi_core(double complex[:, ::1] H, double complex[:, ::1] V,
                      int m, bint want_vectors) nogil:
    """In-place Jacobi diagonalization of the Hermitian matrix H (m x m)."""
    cdef int p, q, i, sweep
    cdef double a, b, absd, theta, c, s, scale, off
    cdef double complex d, phase, sp, cp, hp, hq

    scale = 0.0
    for p in range(m):
        for q in range(m):
            scale += (H[p, q].real * H[p, q].real + H[p, q].imag * H[p, q].imag)
    scale = sqrt(scale)
    if scale < 1e-300:
        scale = 1e-300

    for sweep in range(SWEEP_LIMIT):
        off = 0.0
        for p in range(m):
            for q in range(m):
                if p != q:
                    off += (H[p, q].real * H[p, q].real + H[p, q].imag * H[p, q].imag)
        if sqrt(off) <= 1e-14 * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                d = H[p, q]
                absd = hypot(d.real, d.imag)
                if absd <= 1e-300:
                    continue
                phase = d.conjugate() / absd
                a = H[p, p].real
                b = H[q, q].real
                theta = 0.5 * atan2(2.0 * absd, a - b)
                c = cos(theta)
                s = sin(theta)
                sp = s * phase
                cp = c * phase
                # columns: H <- H @ U, U = [[c, -s], [s*phase, c*phase]] on (p, q)
                for i in range(m):
                    hp = H[i, p]
                    hq = H[i, q]
                    H[i, p] = c * hp + sp * hq
                    H[i, q] = -s * hp + cp * hq
                # rows: H <- U* @ H
                for i in range(m):
                    hp = H[p, i]
                    hq = H[q, i]
                    H[p, i] = c * hp + sp.conjugate() * hq
                    H[q, i] = -s * hp + cp.conjugate() * hq
                if want_vectors:
                    for i in range(m):
                        hp = V[i, p]
                        hq = V[i, q]
                        V[i, p] = c * hp + sp * hq
                        V[i, q] = -s * hp + cp * hq
    return 0


def _sorted_eig_output(cnp.ndarray Hwork, cnp.ndarray V, bint want_vectors):
    w = np.real(np.einsum("...ii->...i", Hwork)).copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if want_vectors:
        V = np.take_along_axis(V, order[..., None, :], axis=-1)
    return w, V


def jacobi_eigh(mat):
    """Eigenvalues/eigenvectors of one Hermitian matrix (ascending order)."""
    H = np.array(mat, dtype=np.complex128, order="C", copy=True)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("expected a square matrix")
    cdef int m = H.shape[0]
    V = np.eye(m, dtype=np.complex128)
    cdef double complex[:, ::1] Hv = H
    cdef double complex[:, ::1] Vv = V
    if m > 1:
        _jacobi_core(Hv, Vv, m, 1)
    w, V = _sorted_eig_output(H, V, 1)
    return w, V


def batch_jacobi_eigh(mats):
    """Eigendecomposition of a (B, m, m) Hermitian stack."""
    H = np.array(mats, dtype=np.complex128, order="C", copy=True)
    if H.ndim == 2:
        H = H[None, :, :]
    cdef Py_ssize_t B = H.shape[0]
    cdef int m = H.shape[1]
    V = np.zeros_like(H)
    V[:, np.arange(m), np.arange(m)] = 1.0
    cdef double complex[:, :, ::1] Hv = H
    cdef double complex[:, :, ::1] Vv = V
    cdef Py_ssize_t bi
    if m > 1:
        for bi in range(B):
            _jacobi_core(Hv[bi], Vv[bi], m, 1)
    return _sorted_eig_output(H, V, 1)


def batch_jacobi_eigvals(mats):
    """Ascending eigenvalues of a (B, m, m) Hermitian stack."""
    H = np.array(mats, dtype=np.complex128, order="C", copy=True)
    if H.ndim == 2:
        H = H[None, :, :]
    cdef Py_ssize_t B = H.shape[0]
    cdef int m = H.shape[1]
    cdef double complex[:, :, ::1] Hv = H
    cdef Py_ssize_t bi
    if m > 1:
        for bi in range(B):
            _jacobi_core(Hv[bi], Hv[bi], m, 0)
    w, _ = _sorted_eig_output(H, None, 0)
    return w


def batch_sigma_max(mats):
    """Largest singular value of each matrix in a (B, r, c) stack."""
    M = np.asarray(mats, dtype=np.complex128)
    if M.ndim == 2:
        M = M[None, :, :]
    r = M.shape[1]
    c = M.shape[2]
    if c <= r:
        G = np.matmul(np.conj(np.swapaxes(M, 1, 2)), M)
    else:
        G = np.matmul(M, np.conj(np.swapaxes(M, 1, 2)))
    w = batch_jacobi_eigvals(np.ascontiguousarray(G))
    return np.sqrt(np.maximum(w[:, -1], 0.0))


def sum_log_abs_diff(z, w, double floor=1e-300):
    """out[i] = sum_j ln|z_i - w_j| with distances floored at `floor`."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] za = np.ascontiguousarray(z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wa = np.ascontiguousarray(w, dtype=np.complex128)
    cdef Py_ssize_t n = za.shape[0]
    cdef Py_ssize_t t = wa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc, dist
    cdef double complex diff
    with nogil:
        for i in range(n):
            acc = 0.0
            for j in range(t):
                diff = za[i] - wa[j]
                dist = hypot(diff.real, diff.imag)
                if dist < floor:
                    dist = floor
                acc += log(dist)
            out[i] = acc
    return out


def pairwise_log_abs(z, double floor=1e-300):
    """P[i, j] = ln|z_i - z_j| for i != j, zero on the diagonal."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] za = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = za.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double dist, v
    cdef double complex diff
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                diff = za[i] - za[j]
                dist = hypot(diff.real, diff.imag)
                if dist < floor:
                    dist = floor
                v = log(dist)
                P[i, j] = v
                P[j, i] = v
    return P


def leja_accumulate(acc, grid, znew, double floor=1e-300):
    """In-place acc[g] += ln|grid[g] - znew|. Returns acc."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] accv = acc
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] gv = np.ascontiguousarray(grid, dtype=np.complex128)
    cdef double complex zc = znew
    cdef Py_ssize_t n = gv.shape[0]
    cdef Py_ssize_t i
    cdef double dist
    cdef double complex diff
    with nogil:
        for i in range(n):
            diff = gv[i] - zc
            dist = hypot(diff.real, diff.imag)
            if dist < floor:
                dist = floor
            accv[i] += log(dist)
    return acc
