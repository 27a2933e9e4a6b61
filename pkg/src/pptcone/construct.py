"""PPT entangled states from dual faces of faces of decomposable maps."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .faces import FacePair, PairKind, certificate_matches, dual_face_of_state, face_points
from .linalg import DEFAULT_TOL, ContractError, MatrixSubspace, complement, partial_transpose
from .maps import DEFAULT_MAX_ITER, DEFAULT_STARTS, DecomposableMap, PositivityReport, positivity_margin
from .projections import alternating_projections, random_psd_start
from .states import EDGE_MIN_STARTS, ProductVectorHit, edge_check, separable_element_in_face

MARGIN_TOL = 1e-6


class EntangledClaim(enum.Enum):
    ByInteriorMargin = "interior-positive-face"
    ByEdgeCheck = "edge-check"
    NoClaim = "none"


class StartPoint(enum.Enum):
    ProjectorOnDperp = "projector"
    RandomPSD = "random"


@dataclass
class FeasibilityOptions:
    max_rounds: int = 2000
    tol: float = DEFAULT_TOL
    start: StartPoint = StartPoint.ProjectorOnDperp
    trace_normalize: bool = True
    retries: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


class NumericalFailure(RuntimeError):
    pass


def _check_pair(D: MatrixSubspace, E: MatrixSubspace):
    if D.dims != E.dims:
        raise ContractError("D and E must share dimensions")


def dual_face_feasibility(D: MatrixSubspace, E: MatrixSubspace,
                          opts: FeasibilityOptions | None = None) -> np.ndarray | None:
    """A nonzero PPT matrix with ``R(A)`` in ``D~^perp`` and ``R(A^tau)`` in ``E~^perp``, or ``None``.

    Alternates between the two range-constrained PSD sets.  With trace
    normalisation an empty face shows up as a positive gap between the sets;
    without it the iterates shrink to zero.
    """
    opts = opts or FeasibilityOptions()
    _check_pair(D, E)
    dims = D.dims
    Q1, Q2 = complement(D.vectors), complement(E.vectors)
    if Q1.shape[1] == 0 or Q2.shape[1] == 0:
        return None
    rng = np.random.default_rng(opts.seed)
    if opts.start is StartPoint.ProjectorOnDperp:
        start = Q1 @ Q1.conj().T / Q1.shape[1]
    else:
        start = random_psd_start(rng, dims.total)
    trace = 1.0 if opts.trace_normalize else None
    run = alternating_projections(dims, Q1, Q2, start, opts.max_rounds, tol=1e-12, trace=trace)
    A = run.state
    if opts.trace_normalize:
        return A if run.gap < 1e-10 else None
    return A if np.linalg.norm(A) > opts.tol and run.gap < 1e-10 * max(np.linalg.norm(A), 1e-300) else None


def dual_face_interior_point(D: MatrixSubspace, E: MatrixSubspace,
                             opts: FeasibilityOptions | None = None) -> np.ndarray | None:
    """Like :func:`dual_face_feasibility`, retrying from random starts until the ranks are maximal.

    Feasible points from all starts are averaged, since a convex combination
    has rank at least that of each summand.
    """
    opts = opts or FeasibilityOptions()
    first = dual_face_feasibility(D, E, opts)
    if first is None:
        return None
    dims = D.dims
    Q1, Q2 = complement(D.vectors), complement(E.vectors)
    Dp, Ep = MatrixSubspace(dims, Q1), MatrixSubspace(dims, Q2)
    if certificate_matches(first, Dp, Ep, opts.tol):
        return first
    rng = np.random.default_rng(opts.seed + 1)
    found, _ = face_points(dims, Q1, Q2, rng, opts.retries, opts.max_rounds)
    A = (first + sum(found)) / (1 + len(found))
    return (A + A.conj().T) / 2


@dataclass
class ConstructionCertificate:
    state: np.ndarray | None
    pair: FacePair
    interior_margin: PositivityReport
    entangled_claim: EntangledClaim
    edge_verdict: str | None = None

    @property
    def empty(self) -> bool:
        return self.state is None


def _is_full(S: MatrixSubspace) -> bool:
    return S.dim == S.dims.total


def construct_ppt_entangled(D: MatrixSubspace, E: MatrixSubspace, opts: FeasibilityOptions | None = None,
                            starts: int = EDGE_MIN_STARTS, max_iter: int = DEFAULT_MAX_ITER,
                            margin_tol: float = MARGIN_TOL) -> ConstructionCertificate:
    """Build a state in the dual face of ``sigma(D, E)`` and classify it.

    The claim is ``ByInteriorMargin`` when the face's interior map is strictly
    positive on product vectors and the dual face is nonzero.  An edge check
    on the constructed state then upgrades the claim to ``ByEdgeCheck`` when
    no product vector is in the ranges, and withdraws it when one is found.
    """
    opts = opts or FeasibilityOptions()
    _check_pair(D, E)
    if D.dim == 0 and E.dim == 0:
        raise ContractError("need D or E nonzero")
    if _is_full(D) and _is_full(E):
        raise ContractError("(M, M) labels the whole cone of decomposable maps, not a proper face")
    pair = FacePair(D, E, PairKind.DecompositionPair)
    report = positivity_margin(pair.interior_map(), starts=starts, iters=max_iter, tol=margin_tol, seed=opts.seed)
    A = dual_face_interior_point(D, E, opts)
    if A is None:
        return ConstructionCertificate(None, pair, report, EntangledClaim.NoClaim)
    claim = EntangledClaim.ByInteriorMargin if report.margin > margin_tol else EntangledClaim.NoClaim
    edge = edge_check(A, D.dims, starts=starts, max_iter=max_iter, seed=opts.seed)
    if edge.is_edge:
        claim = EntangledClaim.ByEdgeCheck
    elif edge.verdict == "not-edge":
        claim = EntangledClaim.NoClaim
    return ConstructionCertificate(A, pair, report, claim, edge.verdict)


def boundary_separable_witness(D: MatrixSubspace, E: MatrixSubspace, starts: int = DEFAULT_STARTS,
                               max_iter: int = DEFAULT_MAX_ITER, seed: int = 0,
                               margin_tol: float = MARGIN_TOL) -> ProductVectorHit | None:
    """A separable state in the dual face when the face lies on the boundary of the positive maps."""
    _check_pair(D, E)
    pair = FacePair(D, E, PairKind.DecompositionPair)
    report = positivity_margin(pair.interior_map(), starts=starts, iters=max_iter, seed=seed)
    if report.margin > margin_tol:
        return None
    dual = pair.perp(PairKind.IntersectionPair)
    return separable_element_in_face(dual, starts, max_iter, seed)


@dataclass
class WitnessPair:
    pair: FacePair
    interior_map: DecomposableMap
    margin: PositivityReport


def extract_witness_pair(A_edge: np.ndarray, dims, starts: int = EDGE_MIN_STARTS,
                         max_iter: int = DEFAULT_MAX_ITER, seed: int = 0,
                         tol: float = DEFAULT_TOL) -> WitnessPair:
    """The decomposition pair whose dual face is the face of an edge state, with its interior map."""
    edge = edge_check(A_edge, dims, starts=starts, max_iter=max_iter, seed=seed, tol=tol)
    if not edge.is_edge:
        raise ContractError(f"input is not a certified edge state (verdict {edge.verdict})")
    pair = dual_face_of_state(A_edge, dims, tol)
    phi = pair.interior_map()
    return WitnessPair(pair, phi, positivity_margin(phi, starts=starts, iters=max_iter, seed=seed))


def max_violation(A: np.ndarray, D: MatrixSubspace, E: MatrixSubspace) -> float:
    """Largest constraint violation of ``A`` against the dual face of ``(D, E)``."""
    dims = D.dims
    At = partial_transpose(A, dims)
    viol = 0.0
    for M, S in ((A, D), (At, E)):
        viol = max(viol, -float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0]))
        viol = max(viol, float(np.linalg.norm(S.vectors.conj().T @ M)))
    return viol
