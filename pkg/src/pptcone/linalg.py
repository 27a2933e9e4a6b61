"""Index conventions and dense linear algebra for bipartite block matrices.

An ``mn x mn`` matrix ``A`` is read as an ``m x m`` array of ``n x n`` blocks
``a_ij``.  The global index of (block ``i``, inner ``k``) is ``i * n + k``
(zero-based), so the block index is slow and the inner index is fast.  A
rectangular ``m x n`` matrix ``z`` is identified with the vector obtained by
flattening its rows, which makes ``vectorize(x y^*) = kron(x, conj(y))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
INCLUSION_TOL = 1e-7


class ContractError(ValueError):
    """An operation was called with input violating its preconditions."""


class DimensionError(ContractError):
    pass


class BipartiteDims(NamedTuple):
    m: int
    n: int

    @property
    def total(self) -> int:
        return self.m * self.n


def as_dims(dims) -> BipartiteDims:
    m, n = (int(d) for d in dims)
    if m < 1 or n < 1:
        raise DimensionError(f"dimensions must be positive, got {(m, n)}")
    return BipartiteDims(m, n)


def check_square(A: np.ndarray, dims) -> np.ndarray:
    dims = as_dims(dims)
    A = np.asarray(A)
    if A.shape != (dims.total, dims.total):
        raise DimensionError(f"expected a {dims.total}x{dims.total} matrix, got shape {A.shape}")
    return A


def is_hermitian(A: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    norm = np.linalg.norm(A)
    return bool(np.linalg.norm(A - A.conj().T) <= tol * max(norm, 1.0))


def require_hermitian(A: np.ndarray, tol: float = DEFAULT_TOL) -> None:
    if not is_hermitian(A, tol):
        raise ContractError("matrix is not Hermitian within tolerance")


def vectorize(z: np.ndarray) -> np.ndarray:
    """Row-major flattening of an ``m x n`` matrix into ``C^n (x) C^m``.

    Component ``i * n + k`` equals ``z[i, k]``.  The map is an isometry for the
    trace inner product ``(z|w) = Tr(w^* z)``.
    """
    z = np.asarray(z)
    if z.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {z.shape}")
    return z.reshape(-1).copy()


def devectorize(v: np.ndarray, dims) -> np.ndarray:
    dims = as_dims(dims)
    v = np.asarray(v)
    if v.shape != (dims.total,):
        raise DimensionError(f"expected a vector of length {dims.total}, got shape {v.shape}")
    return v.reshape(dims.m, dims.n).copy()


def inner(z: np.ndarray, w: np.ndarray) -> complex:
    """Sesquilinear ``(z|w) = Tr(w^* z)``, linear in ``z``."""
    return complex(np.vdot(w, z))


def blocks(A: np.ndarray, dims) -> np.ndarray:
    """View ``A`` as an array ``a[i, j]`` of ``n x n`` blocks, shape ``(m, m, n, n)``."""
    dims = as_dims(dims)
    A = check_square(A, dims)
    return A.reshape(dims.m, dims.n, dims.m, dims.n).transpose(0, 2, 1, 3)


def partial_transpose(A: np.ndarray, dims) -> np.ndarray:
    """Block transpose: block ``(i, j)`` of the result is block ``(j, i)`` of ``A``.

    The inner ``n x n`` blocks are not transposed.
    """
    dims = as_dims(dims)
    A = check_square(A, dims)
    t = A.reshape(dims.m, dims.n, dims.m, dims.n).transpose(2, 1, 0, 3)
    return t.reshape(dims.total, dims.total).copy()


def tensor_product(b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``b (x) c`` for ``b`` in ``M_n`` and ``c`` in ``M_m`` under the block convention.

    Entry ``(i*n + k, j*n + l)`` is ``b[k, l] * c[i, j]``.
    """
    return np.kron(np.asarray(c), np.asarray(b))


def spectral_norm(A: np.ndarray) -> float:
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _hermitian_eigh(A: np.ndarray, tol: float):
    require_hermitian(A, tol)
    H = (A + A.conj().T) / 2
    return np.linalg.eigh(H)


def range_space(A: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the numerical range of a Hermitian matrix.

    Eigenvalues with modulus at most ``tol * ||A||_2`` count as zero.  The
    result has shape ``(N, rank)``; ``rank`` may be zero.
    """
    A = np.asarray(A)
    w, U = _hermitian_eigh(A, tol)
    scale = np.max(np.abs(w)) if w.size else 0.0
    keep = np.abs(w) > tol * scale if scale > 0 else np.zeros_like(w, dtype=bool)
    return U[:, keep]


def numerical_rank(A: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    return range_space(A, tol).shape[1]


@dataclass(frozen=True)
class PsdResult:
    is_psd: bool
    min_eigenvalue: float


def psd_check(A: np.ndarray, tol: float = DEFAULT_TOL) -> PsdResult:
    A = np.asarray(A)
    w, _ = _hermitian_eigh(A, tol)
    lo = float(w[0]) if w.size else 0.0
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return PsdResult(lo >= -tol * scale, lo)


def spectral_margin_flag(A: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when some eigenvalue sits within a factor 10 of the rank threshold."""
    w = np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2))
    scale = w.max() if w.size else 0.0
    if scale == 0:
        return False
    cut = tol * scale
    return bool(np.any((w > cut / 10) & (w < 10 * cut)))


# --- orthonormal column bases -------------------------------------------------


def orthonormalize(vectors: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of ``vectors``."""
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.shape[1] == 0:
        return vectors.copy()
    U, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    return U[:, s > tol * s[0]]


def complement(Q: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of orthonormal columns ``Q``."""
    N, r = Q.shape
    if r == 0:
        return np.eye(N, dtype=complex)
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, r:]


def projector(Q: np.ndarray) -> np.ndarray:
    return Q @ Q.conj().T


def leakage(Q_inner: np.ndarray, Q_outer: np.ndarray) -> float:
    """Largest principal-angle sine of span(``Q_inner``) against span(``Q_outer``)."""
    if Q_inner.shape[1] == 0:
        return 0.0
    residual = Q_inner - Q_outer @ (Q_outer.conj().T @ Q_inner)
    return spectral_norm(residual)


def is_subspace_of(Q_inner: np.ndarray, Q_outer: np.ndarray, tol: float = INCLUSION_TOL) -> bool:
    if Q_inner.shape[1] > Q_outer.shape[1]:
        return False
    return leakage(Q_inner, Q_outer) <= tol


def same_subspace(Q1: np.ndarray, Q2: np.ndarray, tol: float = INCLUSION_TOL) -> bool:
    return Q1.shape[1] == Q2.shape[1] and leakage(Q1, Q2) <= tol


class MatrixSubspace:
    """A subspace of ``m x n`` complex matrices, stored via vectorized orthonormal columns."""

    def __init__(self, dims, vectors: np.ndarray):
        self.dims = as_dims(dims)
        vectors = np.asarray(vectors, dtype=complex).reshape(self.dims.total, -1)
        gram = vectors.conj().T @ vectors
        if not np.allclose(gram, np.eye(vectors.shape[1]), atol=1e-10):
            raise ContractError("basis vectors are not orthonormal")
        vectors = vectors.copy()
        vectors.flags.writeable = False
        self.vectors = vectors

    @classmethod
    def from_matrices(cls, dims, matrices: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> "MatrixSubspace":
        dims = as_dims(dims)
        cols = [vectorize(np.asarray(z, dtype=complex).reshape(dims.m, dims.n)) for z in matrices]
        if not cols:
            return cls.zero(dims)
        return cls(dims, orthonormalize(np.stack(cols, axis=1), tol))

    @classmethod
    def from_vectors(cls, dims, vectors: np.ndarray, tol: float = DEFAULT_TOL) -> "MatrixSubspace":
        dims = as_dims(dims)
        return cls(dims, orthonormalize(np.asarray(vectors).reshape(dims.total, -1), tol))

    @classmethod
    def zero(cls, dims) -> "MatrixSubspace":
        dims = as_dims(dims)
        return cls(dims, np.zeros((dims.total, 0), dtype=complex))

    @classmethod
    def full(cls, dims) -> "MatrixSubspace":
        dims = as_dims(dims)
        return cls(dims, np.eye(dims.total, dtype=complex))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def basis(self) -> list[np.ndarray]:
        return [devectorize(self.vectors[:, k], self.dims) for k in range(self.dim)]

    def projector(self) -> np.ndarray:
        return projector(self.vectors)

    def perp(self) -> "MatrixSubspace":
        return MatrixSubspace(self.dims, complement(self.vectors))

    def contains_vector(self, v: np.ndarray, tol: float = INCLUSION_TOL) -> bool:
        v = np.asarray(v, dtype=complex).reshape(-1)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * nv)

    def __le__(self, other: "MatrixSubspace") -> bool:
        return is_subspace_of(self.vectors, other.vectors)

    def equiv(self, other: "MatrixSubspace", tol: float = INCLUSION_TOL) -> bool:
        return self.dims == other.dims and same_subspace(self.vectors, other.vectors, tol)

    def __repr__(self) -> str:
        return f"<MatrixSubspace dim={self.dim} in M_{self.dims.m}x{self.dims.n}>"
