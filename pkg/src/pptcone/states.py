"""Product vectors in subspaces, edge states and low-dimensional separability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .faces import FacePair, face_of_state, in_T
from .linalg import DEFAULT_TOL, ContractError, MatrixSubspace, as_dims, complement, devectorize
from .maps import DEFAULT_MAX_ITER, DEFAULT_STARTS, bilinear_min_search

FOUND_THRESHOLD = 1e-7
EDGE_FLOOR = 1e-3
EDGE_MIN_STARTS = 200


@dataclass
class ProductVectorHit:
    x: np.ndarray
    y: np.ndarray
    residual: float
    starts: int = 0

    @property
    def product_vector(self) -> np.ndarray:
        """``conj(y) (x) x``, i.e. the vectorization of ``x y^*``."""
        return np.kron(self.x, self.y.conj())


def product_residual(x: np.ndarray, y: np.ndarray, S: np.ndarray, T: np.ndarray | None = None) -> float:
    """``||P_{S^perp}(kron(x, conj y))||^2`` plus the same for ``kron(conj x, conj y)`` against ``T``.

    Computed directly from orthonormal columns ``S`` (and ``T``); unit vectors assumed.
    """
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    v = np.kron(x, y.conj())
    res = np.linalg.norm(v - S @ (S.conj().T @ v)) ** 2
    if T is not None:
        u = np.kron(x.conj(), y.conj())
        res += np.linalg.norm(u - T @ (T.conj().T @ u)) ** 2
    return float(res)


def product_vector_in_subspace(S: np.ndarray, dims, conj_subspace: np.ndarray | None = None,
                               starts: int = DEFAULT_STARTS, max_iter: int = DEFAULT_MAX_ITER,
                               seed: int = 0) -> ProductVectorHit:
    """Search unit ``x``, ``y`` with ``kron(x, conj y)`` in ``S`` (and ``kron(conj x, conj y)`` in the conjugate subspace).

    ``S`` and ``conj_subspace`` are orthonormal column bases in ``C^{mn}``.
    Each squared distance ``||P_{S^perp} v||^2`` is a sum of ``|x^* U y|^2``
    over a basis ``U`` of ``S^perp``, so the search reuses the bilinear
    alternating minimiser.
    """
    dims = as_dims(dims)
    S = np.asarray(S, dtype=complex)
    if S.ndim != 2 or S.shape[0] != dims.total:
        raise ContractError(f"subspace basis must have {dims.total} rows")
    if S.shape[1] == 0:
        raise ContractError("subspace must be nonzero")
    cp = [devectorize(u, dims) for u in complement(S).T]
    cocp = []
    if conj_subspace is not None:
        T = np.asarray(conj_subspace, dtype=complex)
        if T.shape[0] != dims.total:
            raise ContractError(f"conjugate subspace basis must have {dims.total} rows")
        cocp = [devectorize(u, dims) for u in complement(T).T]
    res = bilinear_min_search(dims, cp, cocp, starts, max_iter, seed)
    x, y = res.x / np.linalg.norm(res.x), res.y / np.linalg.norm(res.y)
    return ProductVectorHit(x, y, product_residual(x, y, S, conj_subspace), res.starts)


@dataclass
class EdgeReport:
    is_edge: bool
    verdict: str  # "edge", "not-edge" or "inconclusive"
    best_hit: ProductVectorHit
    starts: int
    threshold: float
    found_threshold: float = FOUND_THRESHOLD


def edge_check(A: np.ndarray, dims, starts: int = EDGE_MIN_STARTS, max_iter: int = DEFAULT_MAX_ITER,
               seed: int = 0, tol: float = DEFAULT_TOL) -> EdgeReport:
    """Decide whether the face of ``A`` in the PPT cone contains a separable state.

    ``A`` is an edge candidate when no product vector ``kron(x, conj y)`` lies
    in ``R(A)`` with ``kron(conj x, conj y)`` in ``R(A^tau)``.  Residuals below
    ``1e-7`` count as a product vector found; an edge verdict needs a residual
    above ``1e-3`` after at least 200 random starts.  Anything else is
    inconclusive.
    """
    dims = as_dims(dims)
    if not in_T(A, dims, tol):
        raise ContractError("edge check needs a PPT matrix")
    face = face_of_state(A, dims, tol)
    hit = product_vector_in_subspace(face.D.vectors, dims, face.E.vectors, starts, max_iter, seed)
    if hit.residual < FOUND_THRESHOLD:
        verdict = "not-edge"
    elif hit.residual > EDGE_FLOOR and starts >= EDGE_MIN_STARTS:
        verdict = "edge"
    else:
        verdict = "inconclusive"
    return EdgeReport(verdict == "edge", verdict, hit, hit.starts, EDGE_FLOOR)


def separability_check_2x2_2x3(A: np.ndarray, dims, tol: float = DEFAULT_TOL) -> bool:
    """PPT test, which decides separability when ``m * n <= 6``."""
    dims = as_dims(dims)
    if dims.total > 6 or min(dims) != 2:
        raise ContractError(f"PPT decides separability only for 2x2, 2x3 and 3x2; got {tuple(dims)}")
    A = np.asarray(A)
    if abs(np.trace(A) - 1) > 1e-8:
        raise ContractError("expected a trace-one state")
    return in_T(A, dims, tol).in_T


def separable_element_in_face(face: FacePair, starts: int = DEFAULT_STARTS,
                              max_iter: int = DEFAULT_MAX_ITER, seed: int = 0) -> ProductVectorHit | None:
    """A product state ``conj(y)conj(y)^* (x) x x^*`` inside the face of the pair, if one is found."""
    if face.D.dim == 0 or face.E.dim == 0:
        return None
    hit = product_vector_in_subspace(face.D.vectors, face.dims, face.E.vectors, starts, max_iter, seed)
    return hit if hit.residual < FOUND_THRESHOLD else None


def product_state(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    v = np.kron(x, np.conj(y))
    return np.outer(v, v.conj())


# --- the 3x3 Tiles unextendible product basis --------------------------------


def tiles_upb() -> list[np.ndarray]:
    """The five Tiles product vectors in ``C^3 (x) C^3`` as ``kron(a, b)``."""
    e = np.eye(3)
    s2 = np.sqrt(2)
    pairs = [
        (e[0], (e[0] - e[1]) / s2),
        ((e[0] - e[1]) / s2, e[2]),
        (e[2], (e[1] - e[2]) / s2),
        ((e[1] - e[2]) / s2, e[0]),
        (np.ones(3) / np.sqrt(3), np.ones(3) / np.sqrt(3)),
    ]
    return [np.kron(a, b).astype(complex) for a, b in pairs]


def tiles_state() -> np.ndarray:
    """``(I - sum u u^*) / 4``, the bound entangled state complementary to the Tiles UPB."""
    P = np.eye(9, dtype=complex)
    for u in tiles_upb():
        P -= np.outer(u, u.conj())
    return P / 4


def tiles_face() -> FacePair:
    return face_of_state(tiles_state(), (3, 3))
