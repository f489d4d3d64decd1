"""Shared test fixtures: random sparse matrices and planted factorizations."""

import numpy as np
import scipy.sparse as sp


def rand_sparse(m, n, density=0.3, seed=0):
    """Nonnegative random CSC matrix with roughly the given density."""
    rng = np.random.default_rng(seed)
    mask = rng.random((m, n)) < density
    return sp.csc_array(rng.random((m, n)) * mask)


def planted_instance(m, n, k, density=0.3, seed=0, noise=0.0):
    """A = W_true @ H_true (+ optional uniform noise), both factors sparse."""
    rng = np.random.default_rng(seed)
    W = rng.random((m, k)) * (rng.random((m, k)) < density)
    H = rng.random((k, n)) * (rng.random((k, n)) < density)
    dense = W @ H
    if noise:
        dense = dense + noise * rng.random((m, n))
    return sp.csc_array(dense), W, H


def spd_matrix(k, seed=0):
    rng = np.random.default_rng(seed)
    M = rng.random((k, k))
    return M.T @ M + np.eye(k)
