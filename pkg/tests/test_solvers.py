import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import planted_instance, rand_sparse
from nmfkit.convergence import MaxIterOnly
from nmfkit.errors import DegenerateInput, InvalidRank, ZeroVector
from nmfkit.initializers import InitStrategy
from nmfkit.solvers import (
    SolverConfig,
    acls_step,
    ahcls_beta,
    ahcls_step,
    gdcls_step,
    mu_step,
    objective_sq,
    solve,
    sparsity_hoyer,
    stationarity_check,
)


class TestSparsityHoyer:
    def test_unit_vector_is_one(self):
        assert sparsity_hoyer(np.array([0.0, 1.0, 0.0, 0.0])) == pytest.approx(1.0)

    def test_constant_vector_is_zero(self):
        assert sparsity_hoyer(np.ones(7)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_value(self):
        # spar((3,4,0,0)): l1 = 7, l2 = 5 -> (2 - 7/5) / (2 - 1) = 0.6
        assert sparsity_hoyer(np.array([3.0, 4.0, 0.0, 0.0])) == pytest.approx(0.6, abs=1e-12)

    def test_zero_vector_raises(self):
        with pytest.raises(ZeroVector):
            sparsity_hoyer(np.zeros(5))

    def test_scalar_degenerate(self):
        with pytest.raises(DegenerateInput):
            sparsity_hoyer(np.array([2.0]))

    @given(arrays(np.float64, st.integers(2, 30), elements=st.floats(0, 100)))
    @settings(max_examples=100, deadline=None)
    def test_bounded_and_scale_invariant(self, x):
        if np.linalg.norm(x) == 0:
            return
        s = sparsity_hoyer(x)
        assert -1e-12 <= s <= 1.0 + 1e-12
        assert sparsity_hoyer(3.5 * x) == pytest.approx(s, abs=1e-9)


class TestAhclsBeta:
    def test_half_alpha_k9(self):
        # ((1 - 0.5) * 3 + 0.5)^2 = 4
        assert ahcls_beta(9, 0.5) == pytest.approx(4.0)

    def test_alpha_one_is_one(self):
        for k in (2, 5, 16):
            assert ahcls_beta(k, 1.0) == pytest.approx(1.0)

    def test_alpha_zero_is_k(self):
        for k in (2, 5, 16):
            assert ahcls_beta(k, 0.0) == pytest.approx(float(k))


class TestAclsStep:
    def test_identity_basis_recovers_a(self):
        # W = I and no penalty: the least-squares H is A itself
        rng = np.random.default_rng(0)
        dense = rng.random((4, 6)) + 0.1  # no zero rows
        A = sp.csc_array(dense)
        W_next, H = acls_step(A, np.eye(4), 0.0, 0.0, rng=np.random.default_rng(1))
        assert np.allclose(H, dense, atol=1e-10)

    def test_matches_normal_equations_oracle(self):
        # oracle: dense solve of (W^T W + lambda I) H = W^T A, then clip
        A = rand_sparse(12, 9, seed=1)
        rng = np.random.default_rng(2)
        W = rng.random((12, 4))
        lam = 0.3
        _, H = acls_step(A, W, lam, lam, rng=np.random.default_rng(3))
        oracle = np.linalg.solve(W.T @ W + lam * np.eye(4), W.T @ A.todense())
        assert np.allclose(H, np.maximum(oracle, 0.0), atol=1e-9)

    def test_huge_penalty_shrinks_h(self):
        A = rand_sparse(10, 8, seed=4)
        W = np.random.default_rng(5).random((10, 3))
        _, H = acls_step(A, W, 1e6, 1e6, rng=np.random.default_rng(6))
        assert np.abs(H).max() <= 1e-4

    def test_nonnegative_output(self):
        A = rand_sparse(15, 12, seed=7)
        W = np.random.default_rng(8).random((15, 4))
        W_next, H = acls_step(A, W, 0.1, 0.1, rng=np.random.default_rng(9))
        assert H.min() >= 0.0 and W_next.min() >= 0.0

    def test_zero_entries_can_reactivate(self):
        # unconstrained solve-and-clip does not lock zeros: find an entry
        # clipped to zero that returns positive on a later iteration
        rng = np.random.default_rng(42)
        A = sp.csc_array(rng.random((12, 10)) * (rng.random((12, 10)) < 0.5))
        W = rng.random((12, 3))
        srng = np.random.default_rng(0)
        _, H = acls_step(A, W, 0.05, 0.05, rng=srng)
        history = [H.copy()]
        for _ in range(6):
            W, H = acls_step(A, W, 0.05, 0.05, rng=srng)
            history.append(H.copy())
        reactivated = False
        for t in range(len(history) - 1):
            zeros = history[t] == 0.0
            for dt in range(1, len(history) - t):
                if np.any(zeros & (history[t + dt] > 0.0)):
                    reactivated = True
        assert reactivated


class TestAhclsStep:
    def test_reduces_to_acls_at_lambda_zero(self):
        A = rand_sparse(10, 8, seed=10)
        W = np.random.default_rng(11).random((10, 3))
        Wa, Ha = acls_step(A, W.copy(), 0.0, 0.0, rng=np.random.default_rng(12))
        Wb, Hb = ahcls_step(A, W.copy(), 0.0, 0.0, 0.5, 0.5, rng=np.random.default_rng(12))
        assert np.allclose(Ha, Hb, atol=1e-12)
        assert np.allclose(Wa, Wb, atol=1e-12)

    def test_matches_normal_equations_oracle(self):
        # oracle: dense solve of (W^T W + lam*beta*I - lam*E) H = W^T A
        A = rand_sparse(12, 9, seed=13)
        W = np.random.default_rng(14).random((12, 4))
        lam, alpha = 0.05, 0.5
        beta = ((1 - alpha) * 2.0 + alpha) ** 2
        _, H = ahcls_step(A, W, lam, lam, alpha, alpha, rng=np.random.default_rng(15))
        G = W.T @ W + lam * beta * np.eye(4) - lam * np.ones((4, 4))
        oracle = np.maximum(np.linalg.solve(G, W.T @ A.todense()), 0.0)
        assert np.allclose(H, oracle, atol=1e-9)

    def test_nonnegative_output(self):
        A = rand_sparse(15, 12, seed=16)
        W = np.random.default_rng(17).random((15, 4))
        Wn, H = ahcls_step(A, W, 0.1, 0.1, 0.8, 0.8, rng=np.random.default_rng(18))
        assert H.min() >= 0.0 and Wn.min() >= 0.0


class TestMuStep:
    def test_exact_factorization_is_fixed_point(self):
        rng = np.random.default_rng(19)
        W = rng.random((9, 3)) + 0.5
        H = rng.random((3, 7)) + 0.5
        A = sp.csc_array(W @ H)
        W2, H2 = mu_step(A, W, H)
        assert np.allclose(W2, W, atol=1e-7)
        assert np.allclose(H2, H, atol=1e-7)

    def test_monotone_objective(self):
        A = rand_sparse(14, 10, seed=20)
        rng = np.random.default_rng(21)
        W = rng.random((14, 3)) + 0.01
        H = rng.random((3, 10)) + 0.01
        prev = objective_sq(A, W, H)
        for _ in range(25):
            W, H = mu_step(A, W, H)
            cur = objective_sq(A, W, H)
            assert cur <= prev + 1e-9
            prev = cur

    def test_zeros_stay_locked(self):
        A = rand_sparse(10, 8, seed=22)
        rng = np.random.default_rng(23)
        W = rng.random((10, 3))
        H = rng.random((3, 8))
        W[2, 1] = 0.0
        H[0, 4] = 0.0
        for _ in range(10):
            W, H = mu_step(A, W, H)
            assert W[2, 1] == 0.0
            assert H[0, 4] == 0.0

    def test_matches_handwritten_update_oracle(self):
        # oracle: elementwise Lee-Seung formula written out directly
        A = rand_sparse(8, 6, seed=24)
        rng = np.random.default_rng(25)
        W = rng.random((8, 2)) + 0.1
        H = rng.random((2, 6)) + 0.1
        Ad = np.asarray(A.todense())
        eps = 1e-9
        H_exp = H * (W.T @ Ad) / (W.T @ W @ H + eps)
        W_exp = W * (Ad @ H_exp.T) / (W @ (H_exp @ H_exp.T) + eps)
        W2, H2 = mu_step(A, W, H)
        assert np.allclose(H2, H_exp, atol=1e-12)
        assert np.allclose(W2, W_exp, atol=1e-12)


class TestGdclsStep:
    def test_h_half_identical_to_acls(self):
        # GDCLS and ACLS share the constrained-least-squares H update
        A = rand_sparse(12, 9, seed=26)
        rng = np.random.default_rng(27)
        W = rng.random((12, 3))
        H = rng.random((3, 9))
        _, H_acls = acls_step(A, W.copy(), 0.0, 0.2, rng=np.random.default_rng(28))
        _, H_gdcls = gdcls_step(A, W.copy(), H.copy(), 0.2, rng=np.random.default_rng(28))
        assert np.array_equal(H_acls, H_gdcls)

    def test_w_half_is_multiplicative(self):
        # composition oracle: the W update locks zeros like MU does
        A = rand_sparse(10, 8, seed=29)
        rng = np.random.default_rng(30)
        W = rng.random((10, 3))
        W[4, 2] = 0.0
        H = rng.random((3, 8))
        W2, _ = gdcls_step(A, W, H, 0.1, rng=np.random.default_rng(31))
        assert W2[4, 2] == 0.0

    def test_objective_improves_on_random_start(self):
        A = rand_sparse(16, 12, seed=32)
        rng = np.random.default_rng(33)
        W = rng.random((16, 4)) + 0.01
        H = rng.random((4, 12)) + 0.01
        before = objective_sq(A, W, H)
        for _ in range(5):
            W, H = gdcls_step(A, W, H, 0.01, rng=rng)
        assert objective_sq(A, W, H) < before


class TestStationarity:
    def test_scalar_stationary_point(self):
        # A = [[2]], W = [1], H = [2] is the exact minimum: residuals are 0
        A = sp.csc_array(np.array([[2.0]]))
        report = stationarity_check(A, np.array([[1.0]]), np.array([[2.0]]))
        assert report.passed
        assert report.max_residual_w == pytest.approx(0.0, abs=1e-12)
        assert report.max_residual_h == pytest.approx(0.0, abs=1e-12)

    def test_random_point_not_stationary(self):
        A = rand_sparse(10, 8, seed=34)
        rng = np.random.default_rng(35)
        report = stationarity_check(A, rng.random((10, 3)), rng.random((3, 8)))
        assert not report.passed

    def test_positive_entry_with_negative_gradient_flagged(self):
        # KKT: min(x, grad) is large-negative when x > 0 wants to grow
        A = sp.csc_array(np.array([[10.0]]))
        report = stationarity_check(A, np.array([[1.0]]), np.array([[1.0]]), tol=1e-6)
        assert not report.passed


class TestSolve:
    def test_invalid_rank(self):
        A = rand_sparse(6, 5)
        with pytest.raises(InvalidRank):
            solve(A, SolverConfig(k=6), InitStrategy(name="random"))

    def test_max_iter_zero_disallowed(self):
        with pytest.raises(ValueError):
            SolverConfig(k=2, max_iter=0)

    def test_bad_algorithm_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(k=2, algorithm="qrnmf")

    def test_runs_one_iteration(self):
        A = rand_sparse(10, 8, seed=36)
        result = solve(
            A,
            SolverConfig(k=2, max_iter=1, check_interval=1, seed=0),
            InitStrategy(name="random", seed=0),
        )
        assert result.iterations_run == 1
        assert result.termination == "maxiter"
        assert result.trace.iterations() == [0, 1]

    def test_factors_nonnegative_and_finite(self):
        A = rand_sparse(20, 15, seed=37)
        for algorithm in ("acls", "ahcls", "mu", "gdcls"):
            result = solve(
                A,
                SolverConfig(k=3, algorithm=algorithm, lambda_w=0.05, lambda_h=0.05,
                             max_iter=15, seed=1),
                InitStrategy(name="acol", p=4, seed=1),
            )
            W, H = result.factors.W, result.factors.H
            assert W.min() >= 0.0 and H.min() >= 0.0
            assert np.isfinite(W).all() and np.isfinite(H).all()

    def test_accepts_precomputed_w0(self):
        A = rand_sparse(10, 8, seed=38)
        W0 = np.random.default_rng(39).random((10, 2))
        by_array = solve(A, SolverConfig(k=2, max_iter=5, seed=0), W0)
        again = solve(A, SolverConfig(k=2, max_iter=5, seed=0), W0.copy())
        assert np.array_equal(by_array.factors.W, again.factors.W)

    def test_wrong_w0_shape_rejected(self):
        A = rand_sparse(10, 8)
        with pytest.raises(InvalidRank):
            solve(A, SolverConfig(k=2, max_iter=5), np.ones((10, 3)))

    def test_acls_objective_trend_on_planted_instance(self):
        A, _, _ = planted_instance(40, 30, 4, seed=40)
        result = solve(
            A,
            SolverConfig(k=4, algorithm="acls", lambda_w=0.01, lambda_h=0.01,
                         max_iter=40, check_interval=5, seed=2,
                         criterion=MaxIterOnly()),
            InitStrategy(name="acol", p=4, seed=2),
        )
        objs = [cp.objective_sq for cp in result.trace.checkpoints]
        assert objs[-1] < 0.05 * objs[0]

    def test_ahcls_lambda_warning(self):
        with pytest.warns(UserWarning):
            SolverConfig(k=3, algorithm="ahcls", lambda_h=5.0)
