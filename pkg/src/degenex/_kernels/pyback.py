"""Pure numpy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is missing (or
when DEGENEX_FORCE_PURE=1). The single-matrix Jacobi solver mirrors the
compiled one; the batched variant applies the same cyclic rotation schedule
to a whole stack of matrices at once so grid scans stay vectorized.

All matrices handled here are small (dimension <= ~32), dense and Hermitian.
"""

import numpy as np

_SWEEP_LIMIT = 60


def _make_hermitian_stack(mats):
    H = np.ascontiguousarray(np.asarray(mats, dtype=np.complex128))
    if H.ndim == 2:
        H = H[None, :, :]
    if H.ndim != 3 or H.shape[1] != H.shape[2]:
        raise ValueError("expected a (batch, m, m) Hermitian stack")
    return H


def batch_jacobi_eigh(mats):
    """Eigendecomposition of a stack of Hermitian matrices by cyclic Jacobi.

    Parameters
    ----------
    mats : array_like, shape (B, m, m) or (m, m)
        Hermitian input(s); the imaginary part of the diagonal is ignored.

    Returns
    -------
    w : ndarray, shape (B, m)
        Eigenvalues in ascending order.
    V : ndarray, shape (B, m, m)
        Unitary matrices whose columns are the matching eigenvectors.
    """
    H = _make_hermitian_stack(mats).copy()
    B, m, _ = H.shape
    V = np.zeros_like(H)
    V[:, np.arange(m), np.arange(m)] = 1.0
    if m == 1 or B == 0:
        w = H[:, np.arange(m), np.arange(m)].real.copy()
        return w, V

    scale = np.maximum(np.sqrt(np.sum(np.abs(H) ** 2, axis=(1, 2))), 1e-300)
    for _ in range(_SWEEP_LIMIT):
        off_sq = (np.sum(np.abs(H) ** 2, axis=(1, 2))
                  - np.sum(np.abs(H[:, np.arange(m), np.arange(m)]) ** 2, axis=1))
        off = np.sqrt(np.maximum(off_sq, 0.0))  # rounding can push this negative
        if np.all(off <= 1e-14 * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                d = H[:, p, q]
                absd = np.abs(d)
                active = absd > 1e-300
                phase = np.where(active, np.conj(d) / np.where(active, absd, 1.0), 1.0 + 0.0j)
                a = H[:, p, p].real
                b = H[:, q, q].real
                theta = 0.5 * np.arctan2(2.0 * absd, a - b)
                c = np.where(active, np.cos(theta), 1.0)
                s = np.where(active, np.sin(theta), 0.0)
                sp = s * phase
                cp = c * phase
                # columns: H <- H @ U with U = [[c, -s], [s*phase, c*phase]] on (p, q)
                Hp = H[:, :, p].copy()
                Hq = H[:, :, q].copy()
                H[:, :, p] = c[:, None] * Hp + sp[:, None] * Hq
                H[:, :, q] = -s[:, None] * Hp + cp[:, None] * Hq
                # rows: H <- U* @ H
                Hp = H[:, p, :].copy()
                Hq = H[:, q, :].copy()
                H[:, p, :] = c[:, None] * Hp + np.conj(sp)[:, None] * Hq
                H[:, q, :] = -s[:, None] * Hp + np.conj(cp)[:, None] * Hq
                # eigenvector accumulation: V <- V @ U
                Vp = V[:, :, p].copy()
                Vq = V[:, :, q].copy()
                V[:, :, p] = c[:, None] * Vp + sp[:, None] * Vq
                V[:, :, q] = -s[:, None] * Vp + cp[:, None] * Vq

    w = H[:, np.arange(m), np.arange(m)].real
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return w, V


def jacobi_eigh(mat):
    """Eigenvalues/eigenvectors of one Hermitian matrix (ascending order)."""
    w, V = batch_jacobi_eigh(np.asarray(mat, dtype=np.complex128)[None, :, :])
    return w[0], V[0]


def batch_jacobi_eigvals(mats):
    """Ascending eigenvalues of a stack of Hermitian matrices."""
    w, _ = batch_jacobi_eigh(mats)
    return w


def batch_sigma_max(mats):
    """Largest singular value of each matrix in a (B, r, c) stack.

    Uses the smaller of the two Gram matrices, then the Jacobi eigensolver.
    """
    M = np.asarray(mats, dtype=np.complex128)
    if M.ndim == 2:
        M = M[None, :, :]
    B, r, c = M.shape
    if c <= r:
        G = np.matmul(np.conj(np.swapaxes(M, 1, 2)), M)
    else:
        G = np.matmul(M, np.conj(np.swapaxes(M, 1, 2)))
    w = batch_jacobi_eigvals(G)
    return np.sqrt(np.maximum(w[:, -1], 0.0))


def sum_log_abs_diff(z, w, floor=1e-300):
    """out[i] = sum_j ln|z_i - w_j| with distances floored at `floor`."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    d = np.abs(z[:, None] - w[None, :])
    return np.sum(np.log(np.maximum(d, floor)), axis=1)


def pairwise_log_abs(z, floor=1e-300):
    """P[i, j] = ln|z_i - z_j| for i != j, zero on the diagonal."""
    z = np.asarray(z, dtype=np.complex128)
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, 1.0)
    return np.log(np.maximum(d, floor))


def leja_accumulate(acc, grid, znew, floor=1e-300):
    """In-place acc[g] += ln|grid[g] - znew|. Returns acc."""
    d = np.abs(np.asarray(grid, dtype=np.complex128) - complex(znew))
    acc += np.log(np.maximum(d, floor))
    return acc
