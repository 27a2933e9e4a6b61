"""Faces of the cone of PPT block matrices and their duals among decomposable maps."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    INCLUSION_TOL,
    ContractError,
    MatrixSubspace,
    as_dims,
    check_square,
    is_subspace_of,
    leakage,
    partial_transpose,
    psd_check,
    range_space,
    require_hermitian,
    spectral_margin_flag,
    vectorize,
)
from .maps import DecomposableMap, pairing_closed_form
from .projections import alternating_projections, random_psd_start


class PairKind(enum.Enum):
    DecompositionPair = "decomposition"
    IntersectionPair = "intersection"


@dataclass
class FacePair:
    """A pair of matrix subspaces labelling a face of the PPT cone or of the decomposable maps."""

    D: MatrixSubspace
    E: MatrixSubspace
    kind: PairKind
    certificate: np.ndarray | None = None
    marginal: bool = False

    def __post_init__(self):
        if self.D.dims != self.E.dims:
            raise ContractError("D and E must live in the same matrix space")
        if self.kind is PairKind.IntersectionPair and self.certificate is not None:
            if not certificate_matches(self.certificate, self.D, self.E):
                raise ContractError("certificate ranges do not match the pair")

    @property
    def dims(self):
        return self.D.dims

    def perp(self, kind: PairKind) -> "FacePair":
        return FacePair(self.D.perp(), self.E.perp(), kind)

    def equiv(self, other: "FacePair", tol: float = INCLUSION_TOL) -> bool:
        return self.D.equiv(other.D, tol) and self.E.equiv(other.E, tol)

    def interior_map(self) -> DecomposableMap:
        """``phi_{basis D} + phi^{basis E}``, an interior point of the decomposable face."""
        return DecomposableMap.from_subspaces(self.D, self.E)


def certificate_matches(A: np.ndarray, D: MatrixSubspace, E: MatrixSubspace,
                        tol: float = DEFAULT_TOL, incl: float = INCLUSION_TOL) -> bool:
    dims = D.dims
    if D.dim == 0 and E.dim == 0:
        return bool(np.linalg.norm(A) == 0 or np.linalg.norm(A) < tol)
    RA = range_space(A, tol)
    RT = range_space(partial_transpose(A, dims), tol)
    return RA.shape[1] == D.dim and RT.shape[1] == E.dim \
        and leakage(RA, D.vectors) <= incl and leakage(RT, E.vectors) <= incl


@dataclass(frozen=True)
class ConeMembership:
    in_psd: bool
    in_pt_psd: bool
    min_eig: float
    min_eig_pt: float

    @property
    def in_T(self) -> bool:
        return self.in_psd and self.in_pt_psd

    def __bool__(self) -> bool:
        return self.in_T


def in_T(A: np.ndarray, dims, tol: float = DEFAULT_TOL) -> ConeMembership:
    A = check_square(A, dims)
    require_hermitian(A, tol)
    p = psd_check(A, tol)
    q = psd_check(partial_transpose(A, dims), tol)
    return ConeMembership(p.is_psd, q.is_psd, p.min_eigenvalue, q.min_eigenvalue)


def _require_T(A, dims, tol):
    if not in_T(A, dims, tol):
        raise ContractError("matrix is not in the PPT cone")


def face_of_state(A: np.ndarray, dims, tol: float = DEFAULT_TOL) -> FacePair:
    """Intersection pair ``(R(A), R(A^tau))`` of the face having ``A`` as an interior point."""
    dims = as_dims(dims)
    _require_T(A, dims, tol)
    At = partial_transpose(A, dims)
    D = MatrixSubspace(dims, range_space(A, tol))
    E = MatrixSubspace(dims, range_space(At, tol))
    marginal = spectral_margin_flag(A, tol) or spectral_margin_flag(At, tol)
    return FacePair(D, E, PairKind.IntersectionPair, np.array(A, dtype=complex), marginal)


def dual_face_of_state(A: np.ndarray, dims, tol: float = DEFAULT_TOL) -> FacePair:
    """Decomposition pair ``(R(A)^perp, R(A^tau)^perp)`` of the face ``A'`` of decomposable maps."""
    face = face_of_state(A, dims, tol)
    dual = face.perp(PairKind.DecompositionPair)
    dual.marginal = face.marginal
    return dual


def pairing_zero_set_check(A: np.ndarray, V: np.ndarray, dims, tol: float = DEFAULT_TOL,
                           angle_tol: float = INCLUSION_TOL) -> bool:
    """Whether ``<A, phi_V> <= tol`` agrees with ``V~`` being orthogonal to ``R(A)``.

    ``V`` is normalised and ``A`` scaled to unit spectral norm first.
    """
    dims = as_dims(dims)
    _require_T(A, dims, tol)
    A = A / np.linalg.norm(A, 2)
    v = vectorize(np.asarray(V, dtype=complex))
    v = v / np.linalg.norm(v)
    value = pairing_closed_form(A, DecomposableMap.cp(dims, [v.reshape(dims.m, dims.n)])).real
    R = range_space(A, tol)
    sine_to_perp = np.linalg.norm(R.conj().T @ v)  # component of v inside R(A)
    return bool((value <= tol) == (sine_to_perp <= angle_tol))


# --- intersection pairs -------------------------------------------------------


@dataclass
class PairVerdict:
    verdict: bool
    certificate: np.ndarray | None
    gap: float = 0.0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.verdict


def face_points(dims, Q1: np.ndarray, Q2: np.ndarray, rng: np.random.Generator,
                restarts: int = 8, max_rounds: int = 2000, tol: float = 1e-12):
    """Trace-one points of ``{A >= 0, A^tau >= 0, R(A) in Q1, R(A^tau) in Q2}``.

    Returns the list of feasible points and the smallest gap reached.  The
    first start is the normalised projector onto span(``Q1``).
    """
    dims = as_dims(dims)
    N = dims.total
    starts = [Q1 @ Q1.conj().T]
    starts += [random_psd_start(rng, N) for _ in range(restarts)]
    found, best_gap = [], np.inf
    for S in starts:
        run = alternating_projections(dims, Q1, Q2, S, max_rounds, tol)
        best_gap = min(best_gap, run.gap)
        if run.gap < 1e-10:
            found.append(run.state)
    return found, best_gap


def feasible_interior_point(dims, Q1, Q2, rng, restarts: int = 8, max_rounds: int = 2000):
    """Average of feasible points, which has maximal ranks on the intersection generically."""
    found, gap = face_points(dims, Q1, Q2, rng, restarts, max_rounds)
    if not found:
        return None, gap
    A = sum(found) / len(found)
    return (A + A.conj().T) / 2, gap


def is_intersection_pair(D: MatrixSubspace, E: MatrixSubspace, seed: int = 0, tol: float = DEFAULT_TOL,
                         restarts: int = 8, max_rounds: int = 2000) -> PairVerdict:
    """Look for ``A`` in the PPT cone with ``R(A) = D~`` and ``R(A^tau) = E~``.

    A positive verdict carries the certificate.  A negative verdict only means
    no certificate was found.
    """
    if D.dims != E.dims:
        raise ContractError("D and E must share dimensions")
    dims = D.dims
    if D.dim == 0 or E.dim == 0:
        ok = D.dim == 0 and E.dim == 0
        cert = np.zeros((dims.total, dims.total), dtype=complex) if ok else None
        return PairVerdict(ok, cert, detail="zero face" if ok else "one side is the zero subspace")
    rng = np.random.default_rng(seed)
    A, gap = feasible_interior_point(dims, D.vectors, E.vectors, rng, restarts, max_rounds)
    if A is None:
        return PairVerdict(False, None, gap, "no feasible point found")
    if certificate_matches(A, D, E, tol):
        return PairVerdict(True, A, gap)
    return PairVerdict(False, None, gap, "feasible points are rank deficient")


def is_exposed_decomposition_pair(D: MatrixSubspace, E: MatrixSubspace, **opts) -> bool:
    return is_intersection_pair(D.perp(), E.perp(), **opts).verdict


# --- sampling and the exposedness check ---------------------------------------


def random_ppt_state(dims, rng: np.random.Generator, rank: int | None = None,
                     method: str = "wishart", max_rounds: int = 200) -> np.ndarray:
    """Random trace-one element of the PPT cone.

    ``wishart`` clips a Wishart matrix alternately on ``A`` and ``A^tau``;
    ``separable`` mixes ``rank`` random product states, which keeps the
    spectrum well separated from zero.
    """
    dims = as_dims(dims)
    N = dims.total
    if rank is None:
        rank = int(rng.integers(1, N + 1))
    if method == "separable":
        A = np.zeros((N, N), dtype=complex)
        for p in rng.dirichlet(np.ones(rank)):
            x = rng.standard_normal(dims.m) + 1j * rng.standard_normal(dims.m)
            y = rng.standard_normal(dims.n) + 1j * rng.standard_normal(dims.n)
            v = np.kron(x / np.linalg.norm(x), (y / np.linalg.norm(y)).conj())
            A += p * np.outer(v, v.conj())
        return A
    if method != "wishart":
        raise ValueError(f"unknown sampling method {method!r}")
    G = rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))
    A = G @ G.conj().T
    for _ in range(max_rounds):
        A = _clip(A)
        A = partial_transpose(_clip(partial_transpose(A, dims)), dims)
        if np.linalg.eigvalsh(A)[0] >= -1e-14 * np.linalg.norm(A, 2):
            break
    A = (A + A.conj().T) / 2
    return A / np.trace(A).real


def _clip(A):
    w, U = np.linalg.eigh((A + A.conj().T) / 2)
    return (U * np.maximum(w, 0)) @ U.conj().T


def face_span_basis(face: FacePair) -> list[np.ndarray]:
    """Hermitian basis of ``{H : R(H) in D~, R(H^tau) in E~}``, the linear span of the face."""
    dims = face.dims
    Q, P = face.D.vectors, face.E.vectors
    r = Q.shape[1]
    if r == 0:
        return []
    herm = []
    for a in range(r):
        for b in range(a, r):
            K = np.zeros((r, r), dtype=complex)
            K[a, b] = 1
            K = K + K.conj().T if a != b else K
            herm.append(K)
            if a != b:
                K = np.zeros((r, r), dtype=complex)
                K[a, b], K[b, a] = 1j, -1j
                herm.append(K)
    Pperp = np.eye(dims.total) - P @ P.conj().T
    cols = []
    for K in herm:
        H = Q @ K @ Q.conj().T
        L = Pperp @ partial_transpose(H, dims)
        cols.append(np.concatenate([L.real.ravel(), L.imag.ravel()]))
    M = np.stack(cols, axis=1)
    _, s, Vh = np.linalg.svd(M)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > 1e-10 * scale))
    null = Vh[rank:].T
    basis = []
    for c in null.T:
        K = sum(ci * Ki for ci, Ki in zip(c, herm))
        H = Q @ K @ Q.conj().T
        basis.append((H + H.conj().T) / 2)
    return basis


def _step_limit(A_c: np.ndarray, H_c: np.ndarray) -> float:
    # largest t with A_c + t H_c >= 0, for A_c > 0
    w, U = np.linalg.eigh(A_c)
    S = (U / np.sqrt(w)) @ U.conj().T
    top = np.linalg.eigvalsh(-(S @ H_c @ S))[-1]
    return np.inf if top <= 0 else 1.0 / top


def sample_face(face: FacePair, A: np.ndarray, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Points of the face through ``A``: scaled copies, interior perturbations and boundary points."""
    dims = face.dims
    basis = face_span_basis(face)
    Q, P = face.D.vectors, face.E.vectors
    At = partial_transpose(A, dims)
    out = []
    for k in range(count):
        if not basis or k % 4 == 0:
            out.append(A * rng.uniform(0.1, 10))
            continue
        H = sum(rng.standard_normal() * Hb for Hb in basis)
        Ht = partial_transpose(H, dims)
        t = min(_step_limit(Q.conj().T @ A @ Q, Q.conj().T @ H @ Q),
                _step_limit(P.conj().T @ At @ P, P.conj().T @ Ht @ P))
        if not np.isfinite(t):
            t = 1.0
        frac = 1.0 if k % 4 == 3 else rng.uniform(0, 1)
        B = A + frac * t * H
        out.append((B + B.conj().T) / 2)
    return out


@dataclass
class ExposednessReport:
    passed: bool
    dual_zero_samples: int
    other_samples: int
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def exposedness_selftest(A: np.ndarray, dims, samples: int = 100, tol: float = DEFAULT_TOL,
                         seed: int = 0) -> ExposednessReport:
    """Check that the zero set of the dual face of ``A``'s face is that face again.

    Random PPT matrices are drawn both from the face itself and from the
    whole cone.  For every draw, vanishing pairing with all ``phi_V``
    (``V`` in ``D^perp``) and ``phi^W`` (``W`` in ``E^perp``) must coincide
    with ``R(B) in D~`` and ``R(B^tau) in E~``.
    """
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    face = face_of_state(A, dims, tol)
    dual = face.perp(PairKind.DecompositionPair)
    maps = [DecomposableMap.cp(dims, [V]) for V in dual.D.basis]
    maps += [DecomposableMap.cocp(dims, [W]) for W in dual.E.basis]

    draws = sample_face(face, A, rng, samples) if face.D.dim else []
    draws += [random_ppt_state(dims, rng, method=("wishart", "separable")[k % 2]) for k in range(samples)]

    report = ExposednessReport(True, 0, 0)
    for k, B in enumerate(draws):
        if not in_T(B, dims, tol):
            report.failures.append(f"draw {k}: not in the PPT cone")
            continue
        scale = np.linalg.norm(B, 2)
        zero = all(pairing_closed_form(B, phi).real <= tol * scale for phi in maps)
        RB = range_space(B, tol)
        RBt = range_space(partial_transpose(B, dims), tol)
        inside = is_subspace_of(RB, face.D.vectors) and is_subspace_of(RBt, face.E.vectors)
        if zero:
            report.dual_zero_samples += 1
        else:
            report.other_samples += 1
        if zero != inside:
            report.failures.append(f"draw {k}: dual-zero={zero} but in-face={inside}")
    report.passed = not report.failures and (report.dual_zero_samples >= samples or not maps
                                             or face.D.dim == 0)
    return report
