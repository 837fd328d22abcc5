import numpy as np
import pytest

from fdasf.kernels import (
    DegenerateSpectrumWarning,
    NotPositiveDefiniteError,
    evd_top_q,
    fix_column_signs,
    gevd_top_q,
    gtrs_solve,
    match_column_signs,
)
from oracles import disk_grid_minimum, power_iteration_evd


def random_spd(rng, n, spread=3.0):
    basis = rng.standard_normal((n, n))
    q, _ = np.linalg.qr(basis)
    vals = np.exp(rng.uniform(-1.0, np.log(spread), n))
    return (q * vals) @ q.T


def gtrs_kkt_violation(h, b, g, x, radius_sq=1.0):
    """Recover the multiplier by a scalar least-squares fit and measure the
    stationarity / feasibility / slackness violations."""
    gx = g @ x
    resid = b - h @ x
    denom = float(gx @ gx)
    mu = float(gx @ resid) / denom if denom > 1e-300 else 0.0
    stationarity = np.linalg.norm((h + mu * g) @ x - b) / (np.linalg.norm(b) + 1.0)
    primal = max(0.0, float(x @ gx) - radius_sq)
    slack = abs(mu * (float(x @ gx) - radius_sq))
    dual = max(0.0, -mu)
    return max(stationarity, primal, slack, dual)


class TestEvdTopQ:
    def test_diagonal_matrix(self):
        x = evd_top_q(np.diag([3.0, 2.0, 1.0]), 2)
        np.testing.assert_allclose(x, np.eye(3)[:, :2], atol=1e-14)

    def test_full_basis_diagonalizes(self):
        rng = np.random.default_rng(0)
        s = random_spd(rng, 7)
        x = evd_top_q(s, 7)
        lam = np.diag(x.T @ s @ x)
        np.testing.assert_allclose(s @ x, x * lam, atol=1e-10)
        np.testing.assert_allclose(x.T @ x, np.eye(7), atol=1e-12)

    def test_matches_power_iteration_oracle(self):
        rng = np.random.default_rng(7)
        basis, _ = np.linalg.qr(rng.standard_normal((8, 8)))
        vals = np.array([9.0, 6.5, 4.0, 2.0, 1.0, 0.5, 0.2, 0.1])
        s = (basis * vals) @ basis.T
        x = evd_top_q(s, 3)
        oracle_vals, oracle_vecs = power_iteration_evd(s, 3)
        np.testing.assert_allclose(oracle_vals, vals[:3], rtol=1e-8)
        for j in range(3):
            ref = oracle_vecs[:, j]
            got = x[:, j]
            if ref @ got < 0:
                ref = -ref
            np.testing.assert_allclose(got, ref, atol=1e-8)

    def test_sign_convention(self):
        s = np.diag([2.0, 1.0])
        x = evd_top_q(s, 1)
        assert x[0, 0] > 0

    def test_degenerate_gap_warns(self):
        with pytest.warns(DegenerateSpectrumWarning):
            evd_top_q(np.eye(3), 1)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            evd_top_q(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)


class TestGevdTopQ:
    def test_identity_metric_reduces_to_evd(self):
        rng = np.random.default_rng(3)
        s = random_spd(rng, 6)
        np.testing.assert_allclose(
            gevd_top_q(s, np.eye(6), 3), evd_top_q(s, 3), atol=1e-12
        )

    def test_two_by_two_closed_form(self):
        # Pencil eigenvalues are 2 / 1 = 2 and 1 / 4 = 0.25.
        x = gevd_top_q(np.diag([2.0, 1.0]), np.diag([1.0, 4.0]), 1)
        np.testing.assert_allclose(x, [[1.0], [0.0]], atol=1e-14)

    @pytest.mark.parametrize("seed", range(8))
    def test_residual_and_normalization(self, seed):
        rng = np.random.default_rng(seed)
        s = random_spd(rng, 6)
        c = random_spd(rng, 6)
        x = gevd_top_q(s, c, 3)
        lam = np.diag(x.T @ s @ x)
        resid = np.linalg.norm(s @ x - c @ (x * lam))
        assert resid <= 1e-9 * np.linalg.norm(s)
        np.testing.assert_allclose(x.T @ c @ x, np.eye(3), atol=1e-10)

    def test_non_pd_metric_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            gevd_top_q(np.eye(3), -np.eye(3), 1)


class TestGtrsSolve:
    def test_boundary_projection(self):
        x = gtrs_solve(np.eye(2), np.array([2.0, 0.0]), np.eye(2))
        np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-10)

    def test_interior_solution(self):
        x = gtrs_solve(np.eye(2), np.array([0.3, 0.0]), np.eye(2))
        np.testing.assert_allclose(x, [0.3, 0.0], atol=1e-12)

    def test_indefinite_pure_eigenvector(self):
        h = np.diag([-1.0, 2.0])
        x = gtrs_solve(h, np.zeros(2), np.eye(2))
        obj = x @ h @ x
        assert obj == pytest.approx(-1.0, abs=1e-10)
        np.testing.assert_allclose(np.abs(x), [1.0, 0.0], atol=1e-10)

    def test_matches_disk_grid_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            h = random_spd(rng, 2) - 2.0 * np.eye(2)
            b = rng.standard_normal(2)
            x = gtrs_solve(h, b, np.eye(2))
            val = x @ h @ x - 2.0 * b @ x
            oracle_val, _ = disk_grid_minimum(h, b)
            assert val <= oracle_val + 1e-4

    def test_degenerate_all_optimal_returns_min_norm(self):
        x = gtrs_solve(np.zeros((3, 3)), np.zeros(3), np.eye(3))
        np.testing.assert_allclose(x, np.zeros(3), atol=1e-14)

    def test_radius_scaling(self):
        x = gtrs_solve(np.eye(2), np.array([5.0, 0.0]), np.eye(2), radius_sq=4.0)
        np.testing.assert_allclose(x, [2.0, 0.0], atol=1e-10)

    def test_non_pd_constraint_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            gtrs_solve(np.eye(2), np.ones(2), np.diag([1.0, 0.0]))

    @pytest.mark.parametrize("seed", range(20))
    def test_random_instances_satisfy_kkt(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        h = random_spd(rng, n) - rng.uniform(0.0, 2.5) * np.eye(n)
        b = rng.standard_normal(n) * rng.uniform(0.1, 3.0)
        g = random_spd(rng, n)
        x = gtrs_solve(h, b, g)
        assert gtrs_kkt_violation(h, b, g, x) <= 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_hard_case_instances(self, seed):
        # Right-hand side orthogonal to the bottom eigenspace forces the
        # boundary-padding branch.
        rng = np.random.default_rng(100 + seed)
        n = 5
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        vals = np.array([-2.0, 0.5, 1.0, 2.0, 3.0])
        h = (basis * vals) @ basis.T
        b_small = basis[:, 1:] @ rng.standard_normal(n - 1) * 0.05
        x = gtrs_solve(h, b_small, np.eye(n))
        assert float(x @ x) == pytest.approx(1.0, abs=1e-9)
        assert gtrs_kkt_violation(h, b_small, np.eye(n), x) <= 1e-9


class TestColumnSignHelpers:
    def test_fix_column_signs(self):
        x = np.array([[1.0, -3.0], [-2.0, 1.0]])
        fixed = fix_column_signs(x)
        np.testing.assert_array_equal(fixed, [[-1.0, 3.0], [2.0, -1.0]])

    def test_match_column_signs_prefers_reference(self):
        base = np.array([[1.0], [0.0]])
        ref = np.array([[-0.9], [0.1]])
        np.testing.assert_array_equal(match_column_signs(base, ref), -base)

    def test_orthogonal_reference_keeps_convention(self):
        base = np.array([[1.0], [0.0]])
        ref = np.array([[0.0], [1.0]])
        np.testing.assert_array_equal(match_column_signs(base, ref), base)
