"""Complex matrix / Laurent polynomial substrate.

Conventions used throughout the package:

  * complex scalars are Python ``complex`` / numpy ``complex128``;
  * matrices are dense numpy arrays of shape (rows, cols);
  * multipartite state vectors are dense, indexed mixed-radix with party 1
    as the most significant digit (C order of a reshape to the local dims);
  * user-facing logarithms are base 2 everywhere.

The operator norm goes through a cyclic Jacobi eigensolve of the Gram
matrix (see degenex._kernels) rather than a general-purpose SVD: all
matrices in this problem domain are tiny and the fixed rotation schedule
keeps results bit-for-bit reproducible across runs and thread counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NotPSD, ShapeMismatch, ZeroAtNegativePower

__all__ = [
    "LaurentMatrix",
    "MultipartiteState",
    "laurent_eval",
    "laurent_eval_many",
    "operator_norm",
    "product_norm",
    "product_norms",
    "hermitian_sqrt",
    "tensor_apply",
]


def _as_cmatrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeMismatch("expected a 2-d matrix, got ndim=%d" % a.ndim)
    return a


@dataclass(frozen=True)
class LaurentMatrix:
    """A matrix-valued Laurent polynomial sum_h z^h M_h in one variable.

    ``terms`` maps integer powers to dense coefficient matrices, all of one
    shape. Exactly-zero coefficient matrices are dropped on construction so
    min_power/max_power always point at genuine terms.
    """

    shape: tuple[int, int]
    terms: dict[int, np.ndarray] = field(compare=False)

    def __init__(self, terms: dict[int, np.ndarray]):
        cleaned: dict[int, np.ndarray] = {}
        shape = None
        for power, mat in terms.items():
            a = _as_cmatrix(mat)
            if not np.all(np.isfinite(a.view(np.float64))):
                raise ValueError("non-finite entry in Laurent coefficient at power %d" % power)
            if shape is None:
                shape = a.shape
            elif a.shape != shape:
                raise ShapeMismatch(
                    "coefficient at power %d has shape %r, expected %r" % (power, a.shape, shape)
                )
            if np.any(a != 0):
                a = a.copy()
                a.flags.writeable = False
                cleaned[int(power)] = a
        if shape is None:
            raise ValueError("a LaurentMatrix needs at least one term")
        if not cleaned:
            # keep an explicit zero constant term so the shape survives
            z = np.zeros(shape, dtype=np.complex128)
            z.flags.writeable = False
            cleaned = {0: z}
        object.__setattr__(self, "shape", (int(shape[0]), int(shape[1])))
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    @property
    def min_power(self) -> int:
        return min(self.terms)

    @property
    def max_power(self) -> int:
        return max(self.terms)

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    def shifted(self, s: int) -> "LaurentMatrix":
        """The Laurent matrix z^s * L(z)."""
        return LaurentMatrix({p + s: m for p, m in self.terms.items()})

    def scaled(self, factor: complex) -> "LaurentMatrix":
        return LaurentMatrix({p: factor * m for p, m in self.terms.items()})

    @classmethod
    def constant(cls, mat) -> "LaurentMatrix":
        return cls({0: _as_cmatrix(mat)})


@dataclass(frozen=True)
class MultipartiteState:
    """A unit vector on a tensor product of k local spaces.

    amplitudes[i] is the coefficient of the mixed-radix basis index i with
    party 1 most significant.
    """

    local_dims: tuple[int, ...]
    amplitudes: np.ndarray = field(compare=False)

    def __init__(self, local_dims, amplitudes, norm_tol: float = 1e-10):
        dims = tuple(int(d) for d in local_dims)
        if any(d <= 0 for d in dims):
            raise ValueError("local dimensions must be positive")
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        expected = int(np.prod(dims))
        if amps.size != expected:
            raise ShapeMismatch(
                "amplitude vector has length %d, dims %r require %d" % (amps.size, dims, expected)
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("non-finite amplitude")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > norm_tol:
            raise ValueError("state norm %.12g is not 1 within %g" % (nrm, norm_tol))
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def k(self) -> int:
        return len(self.local_dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.local_dims)


def laurent_eval(L: LaurentMatrix, z: complex) -> np.ndarray:
    """Evaluate L at the point z by direct term summation."""
    zc = complex(z)
    if zc == 0 and L.min_power < 0:
        raise ZeroAtNegativePower("Laurent matrix with min power %d evaluated at z=0" % L.min_power)
    out = np.zeros(L.shape, dtype=np.complex128)
    for power, mat in L.terms.items():
        if zc == 0:
            if power == 0:
                out += mat
            continue
        out += (zc ** power) * mat
    return out


def laurent_eval_many(L: LaurentMatrix, zs) -> np.ndarray:
    """Evaluate L at a 1-d array of points; returns shape (len(zs), rows, cols)."""
    z = np.asarray(zs, dtype=np.complex128).reshape(-1)
    if L.min_power < 0 and np.any(z == 0):
        raise ZeroAtNegativePower("Laurent matrix with negative powers evaluated at z=0")
    out = np.zeros((z.size,) + L.shape, dtype=np.complex128)
    for power, mat in L.terms.items():
        out += (z ** power)[:, None, None] * mat
    return out


def operator_norm(M) -> float:
    """Largest singular value of a dense matrix."""
    a = _as_cmatrix(M)
    if a.size == 0:
        raise ShapeMismatch("operator_norm of an empty matrix")
    return float(_kernels.batch_sigma_max(a[None, :, :])[0])


def product_norm(deg, z: complex) -> float:
    """||A_1(z) (x) ... (x) A_k(z)|| = prod_j ||A_j(z)||.

    ``deg`` is either a Degeneration (anything with a ``maps`` attribute of
    LaurentMatrix) or a synthetic norm oracle exposing its own
    ``product_norm(z)`` method.
    """
    maps = getattr(deg, "maps", None)
    if maps is None:
        return float(deg.product_norm(z))
    out = 1.0
    for L in maps:
        out *= operator_norm(laurent_eval(L, z))
    return out


def product_norms(deg, zs) -> np.ndarray:
    """Vectorized product_norm over a 1-d array of points."""
    z = np.asarray(zs, dtype=np.complex128).reshape(-1)
    maps = getattr(deg, "maps", None)
    if maps is None:
        return np.array([float(deg.product_norm(zi)) for zi in z])
    out = np.ones(z.size)
    for L in maps:
        out *= _kernels.batch_sigma_max(laurent_eval_many(L, z))
    return out


def hermitian_sqrt(M, clip: float = 1e-9, reject: float = 1e-6) -> np.ndarray:
    """PSD square root of a Hermitian PSD matrix.

    Eigenvalues in [-clip, 0) are treated as rounding noise and clipped to
    zero; anything below -reject raises NotPSD.
    """
    a = _as_cmatrix(M)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch("hermitian_sqrt needs a square matrix")
    herm_defect = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    scale = max(float(np.max(np.abs(a))), 1.0)
    if herm_defect > 1e-8 * scale:
        raise NotPSD("matrix is not Hermitian (defect %.3g)" % herm_defect)
    w, V = _kernels.jacobi_eigh(0.5 * (a + a.conj().T))
    if np.any(w < -reject * scale):
        raise NotPSD("eigenvalue %.6g below tolerance" % float(w.min()))
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)[None, :]) @ V.conj().T


def tensor_apply(maps, state, local_dims=None) -> np.ndarray:
    """Apply M_1 (x) ... (x) M_k to a state vector without forming the product.

    ``state`` may be a MultipartiteState or a flat vector (then
    ``local_dims`` gives the input factorization). Returns the flat output
    vector, indexed by the maps' row dimensions in the same party order.
    """
    if isinstance(state, MultipartiteState):
        dims = state.local_dims
        vec = state.amplitudes
    else:
        if local_dims is None:
            raise ShapeMismatch("local_dims required when state is a raw vector")
        dims = tuple(int(d) for d in local_dims)
        vec = np.asarray(state, dtype=np.complex128).reshape(-1)
    if len(maps) != len(dims):
        raise ShapeMismatch("got %d maps for %d parties" % (len(maps), len(dims)))
    mats = [_as_cmatrix(m) for m in maps]
    for j, m in enumerate(mats):
        if m.shape[1] != dims[j]:
            raise ShapeMismatch(
                "map %d has %d columns, party dimension is %d" % (j, m.shape[1], dims[j])
            )
    if int(np.prod(dims)) != vec.size:
        raise ShapeMismatch("state length %d does not match dims %r" % (vec.size, dims))
    T = vec.reshape(dims)
    for j, m in enumerate(mats):
        T = np.moveaxis(np.tensordot(m, T, axes=([1], [j])), 0, j)
    return T.reshape(-1)
