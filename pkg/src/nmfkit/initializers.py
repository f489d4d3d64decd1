"""Strategies for building the starting basis matrix W.

ALS-type solvers only need W; the first least-squares half step produces H.
Every strategy is seed-deterministic and returns a nonnegative m x k array.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CostWarning, DimensionMismatch, PTooLarge, ResourceLimit
from .linalg import centroid_decomposition, spherical_kmeans, truncated_svd

STRATEGY_NAMES = ("random", "centroid", "svd-centroid", "acol", "random-c", "cooccurrence")

_COOCCURRENCE_WARN_ROWS = 10_000


@dataclass
class InitStrategy:
    """Named initialization with its tuning knobs.

    p: columns averaged per basis column (acol / random-c).
    pool_fraction: fraction of longest columns forming random-c's pool.
    V: optional precomputed n x k SVD factor for svd-centroid.
    """

    name: str = "random"
    p: int = 20
    pool_fraction: float = 0.2
    V: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {self.name!r}; choose from {STRATEGY_NAMES}")


def init_random(m: int, k: int, seed: int = 0) -> np.ndarray:
    """Dense W with i.i.d. uniform(0, 1) entries."""
    return np.random.default_rng(seed).random((m, k))


def _average_columns(A: sp.csc_array, cols: np.ndarray) -> np.ndarray:
    return np.asarray(A[:, cols].sum(axis=1)).ravel() / len(cols)


def init_random_acol(A, k: int, p: int = 20, seed: int = 0) -> np.ndarray:
    """Each W column = average of p data columns drawn without replacement."""
    A = sp.csc_array(A)
    m, n = A.shape
    if p > n:
        raise PTooLarge(f"p={p} exceeds the {n} columns of A")
    rng = np.random.default_rng(seed)
    W = np.empty((m, k))
    for j in range(k):
        W[:, j] = _average_columns(A, rng.choice(n, size=p, replace=False))
    return W


def init_random_c(
    A, k: int, p: int = 20, seed: int = 0, candidate_fraction: float = 0.2
) -> np.ndarray:
    """Like acol, but columns are drawn from the longest (2-norm) columns.

    The candidate pool is the top ceil(candidate_fraction * n) columns by
    2-norm; norm ties break toward the lower column index.
    """
    A = sp.csc_array(A)
    m, n = A.shape
    norms = np.sqrt(np.asarray(A.multiply(A).sum(axis=0)).ravel())
    pool_size = max(1, math.ceil(candidate_fraction * n))
    pool = np.argsort(-norms, kind="stable")[:pool_size]
    if p > pool_size:
        raise PTooLarge(f"p={p} exceeds the candidate pool of {pool_size} columns")
    rng = np.random.default_rng(seed)
    W = np.empty((m, k))
    for j in range(k):
        W[:, j] = _average_columns(A, pool[rng.choice(pool_size, size=p, replace=False)])
    return W


def init_centroid(A, k: int, seed: int = 0) -> np.ndarray:
    """W columns = centroid decomposition of A's columns."""
    return centroid_decomposition(A, k, seed=seed)


def init_svd_centroid(A, V: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Cluster the n rows of the SVD factor V, then average A's columns per cluster.

    Much cheaper than clustering A itself because V is only n x k. Each W
    column is the unit-normalized average of the documents in one cluster.
    """
    A = sp.csc_array(A)
    m, n = A.shape
    V = np.asarray(V, dtype=float)
    if V.shape[0] != n:
        raise DimensionMismatch(f"V has {V.shape[0]} rows but A has {n} columns")
    if V.shape[1] != k:
        raise DimensionMismatch(f"V has {V.shape[1]} columns but k={k}")
    points = V.T  # rows of V as column points, k x n
    norms = np.linalg.norm(points, axis=0)
    keep = np.flatnonzero(norms > 0)
    _, assign_kept = spherical_kmeans(points[:, keep], k, seed=seed)
    assign = np.full(n, -1, dtype=int)
    assign[keep] = assign_kept
    W = np.zeros((m, k))
    for c in range(k):
        members = np.flatnonzero(assign == c)
        if members.size == 0:
            continue
        col = _average_columns(A, members)
        nrm = np.linalg.norm(col)
        W[:, c] = col / nrm if nrm > 0 else col
    return W


def init_cooccurrence(A, k: int, seed: int = 0) -> np.ndarray:
    """Cluster the columns of the term co-occurrence matrix C = A A^T.

    The published column-formation recipe for C is not reproduced here; the
    centroids of C's columns stand in for it, keeping term-term similarity
    as the driver of W. Expensive when the vocabulary is large.
    """
    A = sp.csc_array(A)
    m, _ = A.shape
    if m > _COOCCURRENCE_WARN_ROWS:
        warnings.warn(
            f"co-occurrence initialization forms an {m} x {m} matrix; this is expensive",
            CostWarning,
            stacklevel=2,
        )
    try:
        C = (A @ A.T).tocsc()
    except MemoryError as exc:
        raise ResourceLimit(f"co-occurrence matrix of order {m} does not fit in memory") from exc
    return centroid_decomposition(C, k, seed=seed)


def initialize(A, k: int, strategy: InitStrategy) -> np.ndarray:
    """Dispatch on strategy name and return W (m x k)."""
    m, n = A.shape
    if strategy.name == "random":
        return init_random(m, k, seed=strategy.seed)
    if strategy.name == "acol":
        return init_random_acol(A, k, p=strategy.p, seed=strategy.seed)
    if strategy.name == "random-c":
        return init_random_c(
            A, k, p=strategy.p, seed=strategy.seed, candidate_fraction=strategy.pool_fraction
        )
    if strategy.name == "centroid":
        return init_centroid(A, k, seed=strategy.seed)
    if strategy.name == "svd-centroid":
        V = strategy.V
        if V is None:
            V = truncated_svd(A, k, seed=strategy.seed).V
        return init_svd_centroid(A, V, k, seed=strategy.seed)
    if strategy.name == "cooccurrence":
        return init_cooccurrence(A, k, seed=strategy.seed)
    raise ValueError(f"unknown strategy {strategy.name!r}")
