"""Dense/sparse kernels shared by every solver.

Gram products, multi-RHS SPD solves, the trace-form residual, a seeded
randomized truncated SVD, and spherical k-means centroid decomposition.
All functions are pure; callers own their arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular

from .errors import DegenerateInput, DimensionMismatch, RankTooLarge, SingularSystem

# Pivot threshold for Cholesky, relative to max |G|.
_PIVOT_RTOL = 1e-12
# Ridge added (once) when a regularized Gram loses definiteness.
_RETRY_RIDGE = 1e-10


def as_dense(x) -> np.ndarray:
    """Materialize a (possibly sparse) matrix as a float ndarray."""
    if sp.issparse(x):
        return np.asarray(x.todense(), dtype=float)
    return np.asarray(x, dtype=float)


def gram(M: np.ndarray) -> np.ndarray:
    """Return M^T M, exactly symmetric (upper triangle computed, mirrored)."""
    G = M.T @ M
    G = np.triu(G)
    return G + np.triu(G, 1).T


def _cholesky_lower(G: np.ndarray) -> np.ndarray:
    """Cholesky factor of G with an explicit pivot check.

    Raises SingularSystem when a pivot falls below _PIVOT_RTOL * max|G|,
    signalling the caller to add (more) ridge.
    """
    k = G.shape[0]
    max_g = float(np.abs(G).max()) if G.size else 0.0
    tol = _PIVOT_RTOL * max(max_g, 1e-300)
    L = np.zeros_like(G, dtype=float)
    for j in range(k):
        d = G[j, j] - L[j, :j] @ L[j, :j]
        if d <= tol:
            raise SingularSystem(f"pivot {d:.3e} below tolerance {tol:.3e} at index {j}")
        L[j, j] = math.sqrt(d)
        if j + 1 < k:
            L[j + 1 :, j] = (G[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_spd_multi(G: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve G X = B for all columns of B with one Cholesky factorization.

    G must be symmetric positive definite (the caller typically guarantees
    this through a ridge term). Raises SingularSystem on pivot failure.
    """
    G = np.asarray(G, dtype=float)
    B = np.asarray(B, dtype=float)
    if G.shape[0] != G.shape[1]:
        raise DimensionMismatch(f"G must be square, got {G.shape}")
    if B.shape[0] != G.shape[0]:
        raise DimensionMismatch(f"G is {G.shape} but B has {B.shape[0]} rows")
    L = _cholesky_lower(G)
    Y = solve_triangular(L, B, lower=True)
    return solve_triangular(L.T, Y, lower=False)


def solve_spd_ridged(G: np.ndarray, B: np.ndarray) -> np.ndarray:
    """solve_spd_multi with one automatic ridge retry on pivot failure."""
    try:
        return solve_spd_multi(G, B)
    except SingularSystem:
        k = G.shape[0]
        ridge = _RETRY_RIDGE * max(abs(float(np.trace(G))) / k, 1.0)
        return solve_spd_multi(G + ridge * np.eye(k), B)


def trace_frob_sq(A) -> float:
    """trace(A^T A) = ||A||_F^2, computed once per matrix."""
    if sp.issparse(A):
        return float((A.data ** 2).sum())
    return float(np.sum(np.asarray(A, dtype=float) ** 2))


def residual_trace(
    A,
    W: np.ndarray,
    H: np.ndarray,
    gram_w: np.ndarray,
    wta: np.ndarray,
    trace_ata: float,
) -> float:
    """||A - W H||_F^2 via trace expansion, reusing least-squares byproducts.

    gram_w = W^T W and wta = W^T A come from the most recent CLS step;
    trace_ata is trace(A^T A) computed once. Tiny negative round-off is
    clamped to zero.
    """
    m, n = A.shape
    k = W.shape[1]
    if W.shape[0] != m or H.shape != (k, n):
        raise DimensionMismatch(f"A {A.shape}, W {W.shape}, H {H.shape} are inconsistent")
    if gram_w.shape != (k, k) or wta.shape != (k, n):
        raise DimensionMismatch("byproduct shapes do not match the factor rank")
    cross = float(np.sum(wta * H))
    quad = float(np.sum((gram_w @ H) * H))
    val = trace_ata - 2.0 * cross + quad
    return max(val, 0.0)


@dataclass(frozen=True)
class SvdTriple:
    """Rank-k SVD: U (m x k), descending singular values, V (n x k)."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def truncated_svd(A, k: int, seed: int = 0, oversample: int = 10, power_iters: int = 4) -> SvdTriple:
    """Rank-k SVD by seeded randomized subspace iteration.

    Oversampling and the power-iteration count are fixed at values accurate
    for the small spectra this package targets; each power iteration is
    re-orthonormalized for stability.
    """
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise RankTooLarge(f"k={k} exceeds min{A.shape}={min(m, n)}")
    ell = min(k + oversample, min(m, n))
    rng = np.random.default_rng(seed)
    Omega = rng.standard_normal((n, ell))
    Q, _ = np.linalg.qr(A @ Omega)
    for _ in range(power_iters):
        Z, _ = np.linalg.qr(A.T @ Q)
        Q, _ = np.linalg.qr(A @ Z)
    B = np.asarray(A.T @ Q).T  # ell x n, robust for sparse A
    Ub, s, Vt = np.linalg.svd(B, full_matrices=False)
    return SvdTriple(U=Q @ Ub[:, :k], singular_values=s[:k].copy(), V=Vt[:k].T.copy())


def _normalize_columns(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    out = X / np.where(norms > 0, norms, 1.0)
    return out


def spherical_kmeans(
    X: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Cluster the columns of X on cosine similarity.

    Returns (centroids dims x k, assignment length ncols). Columns must be
    nonzero; empty clusters are re-seeded with the column farthest from its
    assigned centroid. Deterministic per seed (argmax ties break low).
    """
    dims, ncols = X.shape
    if k > ncols:
        raise DegenerateInput(f"k={k} exceeds the {ncols} available columns")
    Xn = _normalize_columns(X)
    rng = np.random.default_rng(seed)
    centroids = Xn[:, rng.choice(ncols, size=k, replace=False)].copy()
    assign = np.zeros(ncols, dtype=int)
    for _ in range(max_iter):
        sims = centroids.T @ Xn  # k x ncols
        assign = np.argmax(sims, axis=0)
        own_sim = sims[assign, np.arange(ncols)]
        new_centroids = np.zeros_like(centroids)
        for c in range(k):
            members = assign == c
            if not members.any():
                worst = int(np.argmin(own_sim))
                new_centroids[:, c] = Xn[:, worst]
                assign[worst] = c
                own_sim[worst] = 1.0
                continue
            mean = Xn[:, members].mean(axis=1)
            nrm = np.linalg.norm(mean)
            new_centroids[:, c] = mean / nrm if nrm > 0 else Xn[:, np.argmax(members)]
        movement = float(np.max(np.linalg.norm(new_centroids - centroids, axis=0)))
        centroids = new_centroids
        if movement < tol:
            break
    return centroids, assign


def centroid_decomposition(M, k: int, seed: int = 0) -> np.ndarray:
    """k centroid vectors (dims x k) of M's columns via spherical k-means.

    Zero columns are excluded from clustering; if fewer than k nonzero
    columns remain the input is degenerate. Nonnegative input yields
    nonnegative centroids.
    """
    X = as_dense(M)
    norms = np.linalg.norm(X, axis=0)
    keep = norms > 0
    if int(keep.sum()) < k:
        raise DegenerateInput(
            f"only {int(keep.sum())} nonzero columns available for k={k} clusters"
        )
    centroids, _ = spherical_kmeans(X[:, keep], k, seed=seed)
    return centroids
