import numpy as np
import pytest

from fdasf.fracprog import dinkelbach_solve, evaluate_ratio, g_value
from fdasf.problems import (
    QolData,
    RtlsData,
    TroData,
    qol_feasibility_bounds,
    qol_problem,
    rtls_problem,
    tro_problem,
)
from fdasf.signals import draw_model, exact_stats
from oracles import grid_root_of_g, qol_reference, scalar_ratio_minimum


def random_spd(rng, n, spread=3.0):
    basis = rng.standard_normal((n, n))
    q, _ = np.linalg.qr(basis)
    vals = np.exp(rng.uniform(-1.0, np.log(spread), n))
    return (q * vals) @ q.T


def experiment_tro_data(m=50, seed=0):
    model = draw_model(m, 2, 2, 0.5, 0.1, 0.1, seed=seed)
    stats = exact_stats(model)
    return TroData(stats.r_vv, stats.r_yy, np.eye(m))


def experiment_rtls_data(m=50, seed=0):
    model = draw_model(m, 1, 0, 0.5, 0.2, 0.3, seed=seed, target_noise_var=0.02)
    stats = exact_stats(model)
    rng = np.random.default_rng(seed + 1)
    l_mat = np.diag(rng.normal(1.0, np.sqrt(0.1), m))
    return RtlsData(stats.r_yy, stats.r_yd, stats.r_dd, np.eye(m), l_mat @ l_mat.T)


def experiment_qol_data(m=100, q=2, seed=0):
    model = draw_model(m, q, 0, 0.5, 0.2, 0.2, seed=seed)
    stats = exact_stats(model)
    rng = np.random.default_rng(seed + 1)
    a = rng.normal(0.0, 1.0, (m, q))
    b = rng.normal(0.0, 1.0, (m, q))
    lo, hi = qol_feasibility_bounds(QolData(stats.r_yy, a, b, 0.0))
    c = 0.5 * (0.5 * (lo + hi) + 1.5 * 0.5 * (hi - lo))
    return QolData(stats.r_yy, a, b, c)


class TestTroProblem:
    def test_proportional_matrices_have_constant_ratio(self):
        rng = np.random.default_rng(1)
        r_yy = random_spd(rng, 6)
        data = TroData(2.0 * r_yy, r_yy, random_spd(rng, 6))
        problem = tro_problem(data, 2)
        for _ in range(5):
            x = rng.standard_normal((6, 2))
            reported = problem.report_sign * evaluate_ratio(problem, x, data)
            assert reported == pytest.approx(2.0, rel=1e-12)

    def test_two_by_two_enumeration(self):
        data = TroData(np.diag([4.0, 1.0]), np.eye(2), np.eye(2))
        problem = tro_problem(data, 1)
        x0 = np.array([[0.6], [0.8]])
        x, rho, _ = dinkelbach_solve(problem, data, x0, tol=1e-12, max_iter=50)
        np.testing.assert_allclose(np.abs(x), [[1.0], [0.0]], atol=1e-9)
        assert problem.report_sign * rho == pytest.approx(4.0, abs=1e-10)

    def test_matches_bisection_root_oracle(self):
        data = experiment_tro_data()
        problem = tro_problem(data, 2)
        rng = np.random.default_rng(3)
        x0, _ = np.linalg.qr(rng.standard_normal((50, 2)))
        _, rho_star, _ = dinkelbach_solve(problem, data, x0, tol=1e-12, max_iter=100)

        # Bisection (not the parametric iteration) on the strictly
        # decreasing minimal-value function.
        def g(rho):
            return g_value(problem, rho, data)

        root = grid_root_of_g(g, rho_star - 0.5, rho_star + 0.5)
        assert rho_star == pytest.approx(root, abs=1e-6)

    def test_constraint_feasibility_of_auxiliary(self):
        rng = np.random.default_rng(4)
        data = TroData(random_spd(rng, 8), random_spd(rng, 8), random_spd(rng, 8))
        problem = tro_problem(data, 3)
        aux = problem.solve_auxiliary(-0.7, data)
        assert problem.constraint_residual(aux.x, data) <= 1e-10

    def test_auxiliary_beats_random_feasible_points(self):
        rng = np.random.default_rng(5)
        data = TroData(random_spd(rng, 7), random_spd(rng, 7), random_spd(rng, 7))
        problem = tro_problem(data, 2)
        chol = np.linalg.cholesky(data.metric)
        rho = -1.3
        aux = problem.solve_auxiliary(rho, data)
        for _ in range(100):
            raw = rng.standard_normal((7, 2))
            q_mat, _ = np.linalg.qr(np.linalg.solve(chol.T, raw))
            ref = np.linalg.solve(chol.T, q_mat)
            # C-orthonormal by construction
            assert aux.objective <= problem.f_value(ref, rho, data) + 1e-9

    def test_non_pd_data_rejected(self):
        with pytest.raises(ValueError):
            tro_problem(TroData(-np.eye(3), np.eye(3), np.eye(3)), 1)


class TestRtlsProblem:
    def test_identity_everything_is_flat(self):
        # f1 and f2 coincide, so the ratio is 1 everywhere and the
        # degenerate auxiliary problem returns the zero filter.
        data = RtlsData(np.eye(4), np.zeros((4, 1)), 1.0, np.eye(4), np.eye(4))
        problem = rtls_problem(data)
        x0 = np.array([[0.3], [0.1], [0.0], [-0.2]])
        x, rho, _ = dinkelbach_solve(problem, data, x0)
        assert rho == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(x, np.zeros((4, 1)), atol=1e-12)

    def test_scalar_closed_form_oracle(self):
        # Single channel, noiseless target: ratio (a x^2 - 2 b x + c)/(1+x^2).
        a, b, c = 0.5, 0.5, 0.5
        data = RtlsData(
            np.array([[a]]), np.array([[b]]), c, np.eye(1), np.array([[0.25]])
        )
        problem = rtls_problem(data)
        x, rho, _ = dinkelbach_solve(problem, data, np.array([[0.4]]), tol=1e-12,
                                     max_iter=100)
        x_ref, rho_ref = scalar_ratio_minimum(a, b, c)
        assert x[0, 0] == pytest.approx(x_ref, abs=1e-9)
        assert rho == pytest.approx(rho_ref, abs=1e-12)
        assert rho == pytest.approx(0.0, abs=1e-12)  # w = 0 )= zero residual

    def test_noisy_target_has_positive_optimum(self):
        a, b = 0.5, 0.5
        c = 0.5 + 0.02
        data = RtlsData(
            np.array([[a]]), np.array([[b]]), c, np.eye(1), np.array([[0.25]])
        )
        problem = rtls_problem(data)
        _, rho, _ = dinkelbach_solve(problem, data, np.array([[0.4]]), tol=1e-12,
                                     max_iter=100)
        _, rho_ref = scalar_ratio_minimum(a, b, c)
        assert rho == pytest.approx(rho_ref, abs=1e-12)
        assert rho > 0.0

    def test_default_stopping_matches_tight_solution(self):
        data = experiment_rtls_data()
        problem = rtls_problem(data)
        rng = np.random.default_rng(6)
        x0 = rng.standard_normal((50, 1)) * 0.05
        x_default, _, _ = dinkelbach_solve(problem, data, x0)
        x_tight, _, _ = dinkelbach_solve(problem, data, x0, tol=1e-12, max_iter=100)
        assert np.linalg.norm(x_default - x_tight) <= 1e-6

    def test_matrix_filter_rejected(self):
        with pytest.raises(ValueError):
            rtls_problem(experiment_rtls_data(), q=2)

    def test_auxiliary_beats_random_feasible_points(self):
        data = experiment_rtls_data(m=10, seed=2)
        problem = rtls_problem(data)
        rng = np.random.default_rng(7)
        rho = 0.05
        aux = problem.solve_auxiliary(rho, data)
        chol = np.linalg.cholesky(data.l_gram)
        for _ in range(100):
            raw = rng.standard_normal(10)
            raw = raw / max(1.0, np.linalg.norm(chol.T @ raw))
            ref = raw[:, None]
            assert aux.objective <= problem.f_value(ref, rho, data) + 1e-9


class TestQolProblem:
    def test_zero_linear_term_closed_form(self):
        rng = np.random.default_rng(8)
        r_yy = random_spd(rng, 5)
        b = rng.standard_normal((5, 2))
        data = QolData(r_yy, np.zeros((5, 2)), b, 10.0)
        problem = qol_problem(data)
        for rho in (0.2, -0.5, 1.3):
            aux = problem.solve_auxiliary(rho, data)
            np.testing.assert_allclose(
                aux.x, 0.5 * rho * np.linalg.solve(r_yy, b), atol=1e-12
            )

    def test_axis_toy_fixed_point_at_origin(self):
        data = QolData(np.eye(3), np.zeros((3, 1)), np.eye(3)[:, :1], 1.0)
        problem = qol_problem(data)
        x0 = np.array([[0.4], [0.0], [0.0]])
        x, rho, _ = dinkelbach_solve(problem, data, x0, tol=1e-12, max_iter=50)
        np.testing.assert_allclose(x, np.zeros((3, 1)), atol=1e-12)
        assert rho == pytest.approx(0.0, abs=1e-12)

    def test_matches_root_finding_oracle(self):
        data = experiment_qol_data()
        problem = qol_problem(data)
        x_ref, rho_ref = qol_reference(data.r_yy, data.a, data.b, data.c)
        rng = np.random.default_rng(9)
        x0 = rng.standard_normal((100, 2)) * 0.01
        if problem.f2(x0, data) <= 0:
            x0 = -x0
        x, rho, _ = dinkelbach_solve(problem, data, x0, tol=1e-12, max_iter=100)
        assert rho == pytest.approx(rho_ref, abs=1e-8)
        rel = np.linalg.norm(x - x_ref) ** 2 / np.linalg.norm(x_ref) ** 2
        assert rel <= 1e-12
        # The oracle point is a root of the minimal-value function.
        assert abs(g_value(problem, evaluate_ratio(problem, x_ref, data), data)) <= 1e-6

    def test_infeasible_offset_rejected(self):
        data = experiment_qol_data(m=10, q=1, seed=3)
        bad = QolData(data.r_yy, data.a, data.b, 0.0)
        lo, hi = qol_feasibility_bounds(bad)
        mid = 0.25 * (lo + hi)  # strictly inside the forbidden band
        with pytest.raises(ValueError, match="infeasible"):
            qol_problem(QolData(data.r_yy, data.a, data.b, mid))

    def test_domain_flag_reported(self):
        data = experiment_qol_data(m=10, q=1, seed=4)
        problem = qol_problem(data)
        aux = problem.solve_auxiliary(0.0, data)
        assert aux.domain_ok == (problem.f2(aux.x, data) > 0.0)

    def test_auxiliary_beats_random_points(self):
        data = experiment_qol_data(m=12, q=2, seed=5)
        problem = qol_problem(data)
        rng = np.random.default_rng(10)
        rho = -0.4
        aux = problem.solve_auxiliary(rho, data)
        for _ in range(100):
            ref = rng.standard_normal((12, 2))
            assert aux.objective <= problem.f_value(ref, rho, data) + 1e-9


class TestNewtonIdentityOnQol:
    def test_consecutive_iterates(self):
        data = experiment_qol_data(m=20, q=2, seed=6)
        problem = qol_problem(data)
        rng = np.random.default_rng(11)
        x0 = rng.standard_normal((20, 2)) * 0.01
        if problem.f2(x0, data) <= 0:
            x0 = -x0
        _, _, trace = dinkelbach_solve(
            problem, data, x0, tol=1e-13, max_iter=40, keep_iterates=True
        )
        seq = trace.rho_sequence
        for i in range(len(seq) - 1):
            x_next = trace.iterate_sequence[i + 1]
            newton = seq[i] - g_value(problem, seq[i], data) / (
                -problem.f2(x_next, data)
            )
            assert seq[i + 1] == pytest.approx(newton, rel=1e-8, abs=1e-10)
