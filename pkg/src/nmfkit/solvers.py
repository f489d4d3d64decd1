"""Iterative NMF solvers: ACLS, AHCLS, and the MU / GDCLS baselines.

All algorithms share one driver, `solve`, which wires initialization,
iteration, checkpointed convergence evaluation, and a terminal KKT
stationarity check.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .convergence import (
    AngularTol,
    Checkpoint,
    ConvergenceTrace,
    Criterion,
    FrobeniusTol,
    MaxIterOnly,
    angular_measure,
    should_stop,
)
from .errors import DegenerateInput, InvalidRank, ZeroVector
from .initializers import InitStrategy, initialize
from .linalg import gram, residual_trace, solve_spd_ridged, trace_frob_sq

ALGORITHMS = ("acls", "ahcls", "mu", "gdcls")

_MU_EPS = 1e-9


def sparsity_hoyer(x) -> float:
    """Hoyer sparsity (sqrt(n) - ||x||_1/||x||_2) / (sqrt(n) - 1), in [0, 1]."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise DegenerateInput("Hoyer sparsity is undefined for vectors of length < 2")
    l2 = float(np.linalg.norm(x))
    if l2 == 0.0:
        raise ZeroVector("Hoyer sparsity is undefined for the zero vector")
    l1 = float(np.abs(x).sum())
    rn = math.sqrt(n)
    return (rn - l1 / l2) / (rn - 1.0)


def ahcls_beta(k: int, alpha: float) -> float:
    """Ridge scale ((1 - alpha) sqrt(k) + alpha)^2 for the Hoyer-constrained system."""
    return ((1.0 - alpha) * math.sqrt(k) + alpha) ** 2


@dataclass
class SolverConfig:
    """Everything a solve needs besides the data matrix and initializer."""

    k: int
    algorithm: str = "acls"
    lambda_w: float = 0.0
    lambda_h: float = 0.0
    alpha_w: float = 0.5
    alpha_h: float = 0.5
    max_iter: int = 100
    criterion: Criterion = field(default_factory=MaxIterOnly)
    check_interval: int = 5
    burn_in: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.k < 1:
            raise InvalidRank("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.lambda_w < 0 or self.lambda_h < 0:
            raise ValueError("lambda_w and lambda_h must be nonnegative")
        if not (0 <= self.alpha_w <= 1 and 0 <= self.alpha_h <= 1):
            raise ValueError("alpha_w and alpha_h must lie in [0, 1]")
        if self.check_interval < 1:
            raise ValueError("check_interval must be >= 1")
        if self.algorithm == "ahcls" and max(self.lambda_w, self.lambda_h) > 1:
            warnings.warn(
                "AHCLS works best with lambda_w, lambda_h <= 1", UserWarning, stacklevel=2
            )


@dataclass
class FactorPair:
    """Nonnegative factors W (m x k) and H (k x n)."""

    W: np.ndarray
    H: np.ndarray
    rank: int


@dataclass(frozen=True)
class StationarityReport:
    max_residual_w: float
    max_residual_h: float
    tol: float
    passed: bool


@dataclass
class SolveResult:
    factors: FactorPair
    trace: ConvergenceTrace
    iterations_run: int
    termination: str  # 'maxiter' | 'frobenius_tol' | 'angular_tol'
    stationarity: StationarityReport


def _clip(X: np.ndarray) -> np.ndarray:
    np.maximum(X, 0.0, out=X)
    return X


def _repair_zero_rows(H: np.ndarray, rng: np.random.Generator) -> None:
    """Replace all-zero H rows with small positives so HH^T stays full rank."""
    dead = np.flatnonzero(~H.any(axis=1))
    if dead.size:
        scale = max(float(H.max()), 1.0) * 1e-3
        for i in dead:
            H[i, :] = rng.random(H.shape[1]) * scale


def _repair_zero_cols(W: np.ndarray, A, rng: np.random.Generator) -> None:
    """Replace all-zero W columns with a fresh random-Acol draw."""
    dead = np.flatnonzero(~W.any(axis=0))
    if dead.size:
        n = A.shape[1]
        p = min(20, n)
        for j in dead:
            cols = rng.choice(n, size=p, replace=False)
            W[:, j] = np.asarray(A[:, cols].sum(axis=1)).ravel() / p


def _cls_solve_h(A, W, ridge: float, ones_coeff: float = 0.0) -> np.ndarray:
    """H = clip(solve(W^T W + ridge I - ones_coeff E, W^T A)); one k x k factorization."""
    k = W.shape[1]
    G = gram(W) + ridge * np.eye(k)
    if ones_coeff:
        G -= ones_coeff * np.ones((k, k))
    return _clip(solve_spd_ridged(G, W.T @ A))


def _cls_solve_w(A, H, ridge: float, ones_coeff: float = 0.0) -> np.ndarray:
    """Symmetric W-side solve: (H H^T + ridge I - ones_coeff E) W^T = H A^T."""
    k = H.shape[0]
    G = gram(H.T) + ridge * np.eye(k)
    if ones_coeff:
        G -= ones_coeff * np.ones((k, k))
    HAt = np.asarray(A @ H.T).T  # k x m without densifying A
    return _clip(solve_spd_ridged(G, HAt).T)


def acls_step(A, W, lambda_w: float, lambda_h: float, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """One ACLS sweep: ridge-penalized CLS for H, then for W, clipping each."""
    rng = rng if rng is not None else np.random.default_rng(0)
    H = _cls_solve_h(A, W, lambda_h)
    _repair_zero_rows(H, rng)
    W = _cls_solve_w(A, H, lambda_w)
    _repair_zero_cols(W, A, rng)
    return W, H


def ahcls_step(
    A, W, lambda_w: float, lambda_h: float, alpha_w: float, alpha_h: float, rng=None
) -> tuple[np.ndarray, np.ndarray]:
    """One AHCLS sweep with Hoyer-targeted ridge beta and all-ones subtraction."""
    rng = rng if rng is not None else np.random.default_rng(0)
    k = W.shape[1]
    beta_h = ahcls_beta(k, alpha_h)
    beta_w = ahcls_beta(k, alpha_w)
    H = _cls_solve_h(A, W, lambda_h * beta_h, ones_coeff=lambda_h)
    _repair_zero_rows(H, rng)
    W = _cls_solve_w(A, H, lambda_w * beta_w, ones_coeff=lambda_w)
    _repair_zero_cols(W, A, rng)
    return W, H


def mu_step(A, W, H) -> tuple[np.ndarray, np.ndarray]:
    """One Lee-Seung multiplicative-update sweep (mean-squared-error form).

    Zero entries stay zero (the locking property); the epsilon floor only
    guards denominators.
    """
    H = H * (W.T @ A) / (gram(W) @ H + _MU_EPS)
    W = W * np.asarray(A @ H.T) / (W @ gram(H.T) + _MU_EPS)
    return W, H


def gdcls_step(A, W, H, lambda_h: float, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Hybrid step: CLS matrix solve for H (as ACLS), multiplicative update for W."""
    rng = rng if rng is not None else np.random.default_rng(0)
    H = _cls_solve_h(A, W, lambda_h)
    _repair_zero_rows(H, rng)
    W = W * np.asarray(A @ H.T) / (W @ gram(H.T) + _MU_EPS)
    return W, H


def _run_step(A, W, H, config: SolverConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    if config.algorithm == "acls":
        return acls_step(A, W, config.lambda_w, config.lambda_h, rng=rng)
    if config.algorithm == "ahcls":
        return ahcls_step(
            A, W, config.lambda_w, config.lambda_h, config.alpha_w, config.alpha_h, rng=rng
        )
    if config.algorithm == "mu":
        return mu_step(A, W, H)
    return gdcls_step(A, W, H, config.lambda_h, rng=rng)


def _penalty_terms(W, H, config: SolverConfig | None) -> float:
    if config is None or config.algorithm == "mu":
        return 0.0
    k = config.k
    if config.algorithm == "acls":
        return config.lambda_h * float(np.sum(H * H)) + config.lambda_w * float(np.sum(W * W))
    if config.algorithm == "gdcls":
        return config.lambda_h * float(np.sum(H * H))
    beta_h = ahcls_beta(k, config.alpha_h)
    beta_w = ahcls_beta(k, config.alpha_w)
    pen_h = beta_h * float(np.sum(H * H)) - float(np.sum(H.sum(axis=0) ** 2))
    pen_w = beta_w * float(np.sum(W * W)) - float(np.sum(W.sum(axis=1) ** 2))
    return config.lambda_h * pen_h + config.lambda_w * pen_w


def objective_sq(A, W, H, config: SolverConfig | None = None) -> float:
    """||A - W H||_F^2 plus the configured penalty terms (if any)."""
    G = gram(W)
    wta = W.T @ A
    fit = residual_trace(A, W, H, G, wta, trace_frob_sq(A))
    return fit + _penalty_terms(W, H, config)


def _reg_gradients(W, H, config: SolverConfig | None) -> tuple[np.ndarray, np.ndarray]:
    zw, zh = np.zeros_like(W), np.zeros_like(H)
    if config is None or config.algorithm == "mu":
        return zw, zh
    if config.algorithm == "acls":
        return 2.0 * config.lambda_w * W, 2.0 * config.lambda_h * H
    if config.algorithm == "gdcls":
        return zw, 2.0 * config.lambda_h * H
    k = config.k
    beta_h = ahcls_beta(k, config.alpha_h)
    beta_w = ahcls_beta(k, config.alpha_w)
    grad_h = 2.0 * config.lambda_h * (beta_h * H - np.tile(H.sum(axis=0), (k, 1)))
    grad_w = 2.0 * config.lambda_w * (beta_w * W - np.tile(W.sum(axis=1)[:, None], (1, k)))
    return grad_w, grad_h


def stationarity_check(
    A, W, H, tol: float = 1e-6, config: SolverConfig | None = None
) -> StationarityReport:
    """Projected-gradient KKT residual min(X, grad f) for both factors.

    The gradient matches the actually-optimized objective: penalty terms
    are included when a config is supplied.
    """
    reg_w, reg_h = _reg_gradients(W, H, config)
    grad_h = 2.0 * (gram(W) @ H - W.T @ A) + reg_h
    grad_w = 2.0 * (W @ gram(H.T) - np.asarray(A @ H.T)) + reg_w
    res_w = float(np.abs(np.minimum(W, grad_w)).max())
    res_h = float(np.abs(np.minimum(H, grad_h)).max())
    return StationarityReport(
        max_residual_w=res_w,
        max_residual_h=res_h,
        tol=tol,
        passed=max(res_w, res_h) <= tol,
    )


def _initial_h(A, W, config: SolverConfig, rng) -> np.ndarray:
    """H^(0) by one CLS-and-clip step from W^(0)."""
    if config.algorithm == "ahcls":
        H = _cls_solve_h(
            A, W, config.lambda_h * ahcls_beta(config.k, config.alpha_h), ones_coeff=config.lambda_h
        )
    else:
        H = _cls_solve_h(A, W, config.lambda_h)
    _repair_zero_rows(H, rng)
    return H


def solve(A, config: SolverConfig, init: InitStrategy | np.ndarray) -> SolveResult:
    """Run the configured algorithm from the given initializer.

    Convergence is evaluated every check_interval iterations (and at the
    final iteration); early stopping only engages past burn_in. The trace
    always contains the iteration-0 checkpoint.
    """
    A = sp.csc_array(A)
    m, n = A.shape
    if config.k > min(m, n):
        raise InvalidRank(f"k={config.k} exceeds min{A.shape}={min(m, n)}")
    criterion = config.criterion
    trace_ata = trace_frob_sq(A)
    if isinstance(criterion, FrobeniusTol) and criterion.eps_f is None:
        criterion = FrobeniusTol(eps_f=1e-4 * math.sqrt(trace_ata))

    rng = np.random.default_rng(config.seed)
    if isinstance(init, np.ndarray):
        W = np.array(init, dtype=float, copy=True)
        if W.shape != (m, config.k):
            raise InvalidRank(f"supplied W0 has shape {W.shape}, expected {(m, config.k)}")
    else:
        W = initialize(A, config.k, init)
    H = _initial_h(A, W, config, rng)

    t0 = time.perf_counter()
    trace = ConvergenceTrace()
    trace.append(
        Checkpoint(
            iteration=0,
            objective_sq=residual_trace(A, W, H, gram(W), W.T @ A, trace_ata),
            theta_max_deg=None,
            elapsed_s=time.perf_counter() - t0,
        )
    )

    termination = "maxiter"
    iterations_run = config.max_iter
    for it in range(1, config.max_iter + 1):
        at_checkpoint = (it % config.check_interval == 0) or it == config.max_iter
        if at_checkpoint:
            W_before = W.copy()
        W, H = _run_step(A, W, H, config, rng)
        if not at_checkpoint:
            continue
        thetas = angular_measure(W_before, W)
        obj = residual_trace(A, W, H, gram(W), W.T @ A, trace_ata)
        trace.append(
            Checkpoint(
                iteration=it,
                objective_sq=obj,
                theta_max_deg=float(np.max(thetas)),
                elapsed_s=time.perf_counter() - t0,
            )
        )
        if it >= config.burn_in:
            reason = should_stop(criterion, trace, thetas)
            if reason is not None:
                termination = reason
                iterations_run = it
                break

    stationarity = stationarity_check(A, W, H, config=config)
    return SolveResult(
        factors=FactorPair(W=W, H=H, rank=config.k),
        trace=trace,
        iterations_run=iterations_run,
        termination=termination,
        stationarity=stationarity,
    )
