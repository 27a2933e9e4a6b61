"""Independent reference computations used to freeze expected values.

Nothing here imports the package: every formula is written out from the
index conventions with explicit loops or brute-force grids.
"""

import itertools

import numpy as np


def vec(z):
    m, n = z.shape
    out = np.zeros(m * n, dtype=complex)
    for i in range(m):
        for k in range(n):
            out[i * n + k] = z[i, k]
    return out


def block_transpose(A, m, n):
    out = np.zeros_like(A)
    for i, j, k, l in itertools.product(range(m), range(m), range(n), range(n)):
        out[i * n + k, j * n + l] = A[j * n + k, i * n + l]
    return out


def kron_bc(b, c):
    """Entry (i n + k, j n + l) = b[k, l] c[i, j]."""
    n, m = b.shape[0], c.shape[0]
    out = np.zeros((m * n, m * n), dtype=complex)
    for i, j, k, l in itertools.product(range(m), range(m), range(n), range(n)):
        out[i * n + k, j * n + l] = b[k, l] * c[i, j]
    return out


def map_on(X, cp, cocp):
    return sum((V.conj().T @ X @ V for V in cp), 0) + sum((W.conj().T @ X.T @ W for W in cocp), 0)


def pairing_trace(A, cp, cocp, m, n):
    """Tr[(sum_ij phi(e_ij) (x) e_ij) A^T] with the Choi matrix built entrywise."""
    C = np.zeros((m * n, m * n), dtype=complex)
    for i, j in itertools.product(range(m), range(m)):
        e = np.zeros((m, m))
        e[i, j] = 1
        C += kron_bc(map_on(e, cp, cocp), e)
    return np.trace(C @ A.T)


def sphere2_grid(res=40):
    """Unit vectors of C^2 on a Bloch-sphere grid (global phase removed)."""
    th = np.linspace(0, np.pi, res)
    ph = np.linspace(0, 2 * np.pi, res, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.cos(T / 2), np.sin(T / 2) * np.exp(1j * P)], axis=-1).reshape(-1, 2)


def sphere3_grid(res=40):
    """Unit vectors of C^3: two moduli angles and two relative phases, ``res`` points each."""
    a = np.linspace(0, np.pi / 2, res)
    b = np.linspace(0, np.pi / 2, res)
    p = np.linspace(0, 2 * np.pi, res, endpoint=False)
    A, B, P, Q = np.meshgrid(a, b, p, p, indexing="ij")
    x = np.stack([np.cos(A) + 0j, np.sin(A) * np.cos(B) * np.exp(1j * P), np.sin(A) * np.sin(B) * np.exp(1j * Q)],
                 axis=-1)
    return x.reshape(-1, 3)


def margin_grid(cp, cocp, xs):
    """min_x lambda_min(phi(x x^*)): exact in y, brute force over the x grid."""
    best = np.inf
    for chunk in np.array_split(xs, max(1, len(xs) // 20000)):
        M = 0
        for V in cp:
            u = chunk.conj() @ V  # rows x^* V
            M = M + np.einsum("si,sj->sij", u.conj(), u)
        for W in cocp:
            u = chunk @ W  # rows x^T W
            M = M + np.einsum("si,sj->sij", u.conj(), u)
        best = min(best, np.linalg.eigvalsh(M)[:, 0].min())
    return float(best)


def product_residual_grid(S, T, xs, n):
    """min over grid x, exact y, of ||P_{S^perp}(x (x) conj y)||^2 + ||P_{T^perp}(conj x (x) conj y)||^2."""
    N = S.shape[0]
    Pp = np.eye(N) - S @ S.conj().T
    Qp = np.eye(N) - T @ T.conj().T if T is not None else None
    best = np.inf
    eye = np.eye(n)
    for chunk in np.array_split(xs, max(1, len(xs) // 20000)):
        L = np.einsum("si,kl->sikl", chunk, eye).reshape(len(chunk), N, n)  # (x (x) I) as N x n
        M = np.einsum("sai,ab,sbj->sij", L.conj(), Pp, L)
        if Qp is not None:
            Lc = L.conj()
            M = M + np.einsum("sai,ab,sbj->sij", Lc.conj(), Qp, Lc)
        best = min(best, np.linalg.eigvalsh(M)[:, 0].min())
    return float(best)
