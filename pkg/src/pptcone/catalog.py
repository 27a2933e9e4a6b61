"""The six classes of faces of the 2x2 PPT cone and the worked ``([I]^perp, M_2)`` example."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .faces import FacePair, PairKind, certificate_matches, face_of_state, is_intersection_pair
from .linalg import ContractError, MatrixSubspace, partial_transpose, vectorize
from .states import product_state

DIMS = (2, 2)
PARALLEL_TOL = 1e-9

PAPER_VECTORS = [
    (np.array([1, 0]), np.array([0, 1])),
    (np.array([0, 1]), np.array([1, 0])),
    (np.array([1, -1]), np.array([1, 1])),
    (np.array([-1j, 1]), np.array([1, -1j])),
]

PRINTED_MATRIX = np.array([
    [2, 1 - 1j, -1 - 1j, -2],
    [1 + 1j, 3, 0, -1 - 1j],
    [-1 + 1j, 0, 3, 1 - 1j],
    [-2, -1 + 1j, 1 + 1j, 2],
], dtype=complex)


class FaceClass(enum.Enum):
    ExtremalRay = "([xy*], [x'y*])"
    TwoProduct = "([xy*, zw*], [x'y*, z'w*])"
    RankTwoComplement = "([V]perp, [W]perp)"
    MaximalConjugate = "([xy*]perp, [x'y*]perp)"
    MaximalLeft = "([V]perp, M2)"
    MaximalRight = "(M2, [W]perp)"


MAXIMAL_CLASSES = (FaceClass.MaximalConjugate, FaceClass.MaximalLeft, FaceClass.MaximalRight)


@dataclass
class CatalogFace:
    cls: FaceClass
    pair: FacePair
    generators: list[np.ndarray] = field(default_factory=list)

    @property
    def certificate(self) -> np.ndarray:
        return self.pair.certificate


def _vec(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape != (2,) or np.linalg.norm(x) == 0:
        raise ContractError("expected a nonzero vector in C^2")
    return x


def _span(mats) -> MatrixSubspace:
    return MatrixSubspace.from_matrices(DIMS, mats)


def _perp2(x: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(x[1]), np.conj(x[0])])


def parallel(x: np.ndarray, z: np.ndarray) -> bool:
    return abs(x[0] * z[1] - x[1] * z[0]) <= PARALLEL_TOL * np.linalg.norm(x) * np.linalg.norm(z)


def _pair(D, E, cert) -> FacePair:
    return FacePair(D, E, PairKind.IntersectionPair, cert)


def paper_example() -> np.ndarray:
    """Sum of ``vec(x_i y_i^*) vec(x_i y_i^*)^*`` over the four printed vector pairs.

    All entries are Gaussian integers, so the sum is exact in floating point.
    """
    A = np.zeros((4, 4), dtype=complex)
    for x, y in PAPER_VECTORS:
        v = vectorize(np.outer(x, np.conj(y)))
        A += np.outer(v, v.conj())
    return A


def face_class_extremal(x, y) -> CatalogFace:
    x, y = _vec(x), _vec(y)
    z = np.outer(x, y.conj())
    pair = _pair(_span([z]), _span([np.outer(x.conj(), y.conj())]), product_state(x, y))
    return CatalogFace(FaceClass.ExtremalRay, pair, [z])


def face_class_two_product(x, y, z, w) -> CatalogFace:
    x, y, z, w = map(_vec, (x, y, z, w))
    if parallel(x, z) and parallel(y, w):
        raise ContractError("need x and z non-parallel or y and w non-parallel")
    gens = [np.outer(x, y.conj()), np.outer(z, w.conj())]
    conj = [np.outer(x.conj(), y.conj()), np.outer(z.conj(), w.conj())]
    cert = product_state(x, y) + product_state(z, w)
    return CatalogFace(FaceClass.TwoProduct, _pair(_span(gens), _span(conj), cert), gens)


def face_class_maximal_conjugate(x, y) -> CatalogFace:
    x, y = _vec(x), _vec(y)
    z, w = _perp2(x), _perp2(y)
    gens = [np.outer(z, y.conj()), np.outer(x, w.conj()), np.outer(z, w.conj())]
    conj = [np.outer(z.conj(), y.conj()), np.outer(x.conj(), w.conj()), np.outer(z.conj(), w.conj())]
    D, E = _span(gens), _span(conj)
    if not (D.equiv(_span([np.outer(x, y.conj())]).perp())
            and E.equiv(_span([np.outer(x.conj(), y.conj())]).perp())):
        raise ArithmeticError("rank-one spanning sets do not match the orthocomplements")
    cert = product_state(z, y) + product_state(x, w) + product_state(z, w)
    return CatalogFace(FaceClass.MaximalConjugate, _pair(D, E, cert), gens)


def _require_rank_two(V) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.shape != (2, 2):
        raise ContractError("expected a 2x2 matrix")
    s = np.linalg.svd(V, compute_uv=False)
    if s[1] <= PARALLEL_TOL * max(s[0], 1e-300):
        raise ContractError("matrix must have rank two")
    return V


def _solve(D, E, seed) -> np.ndarray:
    verdict = is_intersection_pair(D, E, seed=seed)
    if not verdict:
        raise ArithmeticError(f"no interior certificate found: {verdict.detail}")
    return verdict.certificate


def face_class_maximal_left(V, seed: int = 0) -> CatalogFace:
    V = _require_rank_two(V)
    D, E = _span([V]).perp(), MatrixSubspace.full(DIMS)
    if np.allclose(V, V[0, 0] * np.eye(2)):
        cert = paper_example()
    else:
        cert = _solve(D, E, seed)
    return CatalogFace(FaceClass.MaximalLeft, _pair(D, E, cert))


def face_class_maximal_right(W, seed: int = 0) -> CatalogFace:
    W = _require_rank_two(W)
    D, E = MatrixSubspace.full(DIMS), _span([W]).perp()
    if np.allclose(W, W[0, 0] * np.eye(2)):
        cert = partial_transpose(paper_example(), DIMS)
    else:
        cert = _solve(D, E, seed)
    return CatalogFace(FaceClass.MaximalRight, _pair(D, E, cert))


def face_class_rank_two_complement(V, W, seed: int = 0) -> CatalogFace:
    """``([V]^perp, [W]^perp)``; admissibility of ``(V, W)`` is decided by the certificate search."""
    V, W = _require_rank_two(V), _require_rank_two(W)
    D, E = _span([V]).perp(), _span([W]).perp()
    verdict = is_intersection_pair(D, E, seed=seed)
    if not verdict:
        raise ContractError(f"([V]perp, [W]perp) is not an intersection pair: {verdict.detail}")
    return CatalogFace(FaceClass.RankTwoComplement, _pair(D, E, verdict.certificate))


def random_rank_two_complement_input(rng: np.random.Generator):
    """Draw ``(V, W)`` from three products ``x_i y_i^*`` with ``V y_i`` orthogonal to ``x_i``."""
    while True:
        V = _crandn(rng, (2, 2))
        xs, ys = [], []
        for _ in range(3):
            y = _crandn(rng, 2)
            xs.append(_perp2(V @ y))
            ys.append(y)
        conj = [vectorize(np.outer(x.conj(), y.conj())) for x, y in zip(xs, ys)]
        W_vec = MatrixSubspace.from_vectors(DIMS, np.stack(conj, axis=1))
        if W_vec.dim != 3:
            continue
        W = W_vec.perp().basis[0]
        s = np.linalg.svd(W, compute_uv=False)
        if s[1] > 1e-3 * s[0]:
            return V, W, xs, ys


def _crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_face(cls: FaceClass, rng: np.random.Generator) -> CatalogFace:
    seed = int(rng.integers(2**31))
    if cls is FaceClass.ExtremalRay:
        return face_class_extremal(_crandn(rng, 2), _crandn(rng, 2))
    if cls is FaceClass.TwoProduct:
        return face_class_two_product(*(_crandn(rng, 2) for _ in range(4)))
    if cls is FaceClass.MaximalConjugate:
        return face_class_maximal_conjugate(_crandn(rng, 2), _crandn(rng, 2))
    if cls is FaceClass.MaximalLeft:
        return face_class_maximal_left(_crandn(rng, (2, 2)), seed)
    if cls is FaceClass.MaximalRight:
        return face_class_maximal_right(_crandn(rng, (2, 2)), seed)
    V, W, xs, ys = random_rank_two_complement_input(rng)
    return face_class_rank_two_complement(V, W, seed)


@dataclass
class CatalogTrial:
    cls: FaceClass
    trial: int
    intersection: bool
    recovered: bool
    maximal: bool | None
    dims: tuple[int, int]

    @property
    def passed(self) -> bool:
        return self.intersection and self.recovered and self.maximal is not False


@dataclass
class CatalogReport:
    seed: int
    trials: list[CatalogTrial]

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.trials)


def _is_maximal(face: CatalogFace, rng) -> bool:
    # adding any product state outside the face must yield the whole cone
    x, y = _crandn(rng, 2), _crandn(rng, 2)
    bigger = face.certificate / np.trace(face.certificate).real + product_state(x / np.linalg.norm(x),
                                                                                 y / np.linalg.norm(y))
    grown = face_of_state(bigger, DIMS)
    return grown.D.dim == 4 and grown.E.dim == 4


def validate_catalog(seed: int = 1, trials: int = 20) -> CatalogReport:
    rng = np.random.default_rng(seed)
    out = []
    for cls in FaceClass:
        for k in range(trials):
            face = random_face(cls, rng)
            verdict = is_intersection_pair(face.pair.D, face.pair.E, seed=int(rng.integers(2**31)))
            recovered = face_of_state(face.certificate, DIMS)
            ok = recovered.equiv(face.pair) and certificate_matches(face.certificate, face.pair.D, face.pair.E)
            maximal = _is_maximal(face, rng) if cls in MAXIMAL_CLASSES else None
            out.append(CatalogTrial(cls, k, verdict.verdict, ok, maximal,
                                    (recovered.D.dim, recovered.E.dim)))
    return CatalogReport(seed, out)
