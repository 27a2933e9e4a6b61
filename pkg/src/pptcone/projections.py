"""Alternating projections onto range-constrained PSD sets and their block transposes.

The two sets are

    K1 = {A >= 0 : range(A) in span(Q1), Tr A = 1}
    K2 = {A : A^tau >= 0, range(A^tau) in span(Q2), Tr A = 1}

Both are compact and convex; alternating projections converge to a point of
``K1 & K2`` when it is nonempty and to a pair of nearest points otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_dims, partial_transpose

DEFAULT_ROUNDS = 2000


def project_simplex(w: np.ndarray, total: float = 1.0) -> np.ndarray:
    """Euclidean projection of a real vector onto ``{p >= 0, sum p = total}``."""
    if w.size == 0:
        return w.copy()
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - total
    ks = np.arange(1, w.size + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(w - theta, 0.0)


def project_range_psd(H: np.ndarray, Q: np.ndarray, trace: float | None = 1.0) -> np.ndarray:
    """Nearest PSD matrix supported on span(``Q``), optionally with fixed trace.

    ``Q`` must have orthonormal columns.  With ``trace=None`` negative
    eigenvalues are clipped instead of projected onto the simplex.
    """
    N = H.shape[0]
    if Q.shape[1] == 0:
        return np.zeros((N, N), dtype=complex)
    C = Q.conj().T @ ((H + H.conj().T) / 2) @ Q
    w, U = np.linalg.eigh((C + C.conj().T) / 2)
    w = np.maximum(w, 0.0) if trace is None else project_simplex(w, trace)
    B = Q @ (U * w) @ U.conj().T @ Q.conj().T
    return (B + B.conj().T) / 2


@dataclass
class ProjectionRun:
    state: np.ndarray  # last iterate, an exact member of K1
    gap: float  # Frobenius distance between the last K1 and K2 iterates
    rounds: int
    converged: bool
    history: list[float]
    iterates: list[np.ndarray] | None = None


def alternating_projections(
    dims,
    Q1: np.ndarray,
    Q2: np.ndarray,
    start: np.ndarray,
    max_rounds: int = DEFAULT_ROUNDS,
    tol: float = 1e-12,
    trace: float | None = 1.0,
    record: bool = False,
) -> ProjectionRun:
    dims = as_dims(dims)
    A = project_range_psd(start, Q1, trace)
    history = []
    iterates = [A] if record else None
    gap = np.inf
    prev = np.inf
    converged = False
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        B = partial_transpose(project_range_psd(partial_transpose(A, dims), Q2, trace), dims)
        A_next = project_range_psd(B, Q1, trace)
        gap = float(np.linalg.norm(A_next - B))
        history.append(gap)
        step = float(np.linalg.norm(A_next - A))
        A = A_next
        if record:
            iterates.append(A)
        if gap < tol:
            converged = True
            break
        # stalled at a positive distance: the sets are (numerically) disjoint
        if step < tol * 1e-2 and abs(prev - gap) < tol * 1e-2:
            converged = True
            break
        prev = gap
    return ProjectionRun(A, gap, rounds, converged, history, iterates)


def random_psd_start(rng: np.random.Generator, N: int) -> np.ndarray:
    G = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    A = G @ G.conj().T
    return A / np.trace(A).real
