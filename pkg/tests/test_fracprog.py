import numpy as np
import pytest

from fdasf.fracprog import (
    AuxResult,
    FractionalProblem,
    NonPositiveDenominatorError,
    dinkelbach_solve,
    evaluate_ratio,
    g_value,
)


class IntervalToy(FractionalProblem):
    """Scalar toy: f1 = x^2, f2 = x on an interval [a, b] with a > 0.

    The auxiliary minimizer of x^2 - rho x on [a, b] is the clipped vertex
    rho / 2, available in closed form.
    """

    q = 1
    constraint_kinds = ("ineq", "ineq")

    def __init__(self, lo=1.0, hi=2.0):
        self.lo, self.hi = lo, hi

    def f1(self, x, data):
        return float(x[0, 0] ** 2)

    def f2(self, x, data):
        return float(x[0, 0])

    def solve_auxiliary(self, rho, data, warm_start=None):
        x = min(max(rho / 2.0, self.lo), self.hi)
        arr = np.array([[x]])
        return AuxResult(arr, self.f_value(arr, rho, data))

    def f_gradient(self, x, rho, data):
        return np.array([[2.0 * x[0, 0] - rho]])

    def constraint_values(self, x, data):
        return np.array([self.lo - x[0, 0], x[0, 0] - self.hi])

    def constraint_gradients(self, x, data):
        return [np.array([[-1.0]]), np.array([[1.0]])]


def as_point(x):
    return np.array([[float(x)]])


class TestEvaluateRatio:
    def test_equal_numerator_denominator(self):
        toy = IntervalToy()
        assert evaluate_ratio(toy, as_point(1.0), None) == 1.0

    def test_scalar_toy_value(self):
        toy = IntervalToy()
        assert evaluate_ratio(toy, as_point(2.0), None) == pytest.approx(2.0)

    def test_nonpositive_denominator_raises(self):
        toy = IntervalToy()
        with pytest.raises(NonPositiveDenominatorError):
            evaluate_ratio(toy, as_point(-1.0), None)


class TestDinkelbachSolve:
    def test_scalar_toy_two_solves(self):
        toy = IntervalToy()
        x, rho, trace = dinkelbach_solve(toy, None, as_point(2.0))
        assert x[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert rho == pytest.approx(1.0, abs=1e-12)
        assert trace.aux_solve_count == 2
        assert trace.converged
        np.testing.assert_allclose(trace.rho_sequence, [2.0, 1.0, 1.0])

    def test_fixed_point_converges_in_one_solve(self):
        toy = IntervalToy()
        x, rho, trace = dinkelbach_solve(toy, None, as_point(1.0))
        assert trace.aux_solve_count == 1
        assert rho == pytest.approx(1.0)
        assert trace.rho_sequence == [1.0, 1.0]

    def test_rho_sequence_non_increasing(self):
        toy = IntervalToy(0.5, 7.0)
        for start in (0.6, 2.5, 7.0):
            _, _, trace = dinkelbach_solve(toy, None, as_point(start))
            seq = trace.rho_sequence
            assert all(b <= a + 1e-10 for a, b in zip(seq, seq[1:]))

    def test_max_iter_budget_respected(self):
        # From x0 = 6 the interior iterates halve each round (6, 3, 1.5, ...),
        # so three solves cannot reach the clipped fixed point at 0.5.
        toy = IntervalToy(0.5, 7.0)
        _, _, trace = dinkelbach_solve(toy, None, as_point(6.0), tol=1e-30, max_iter=3)
        assert trace.aux_solve_count == 3
        assert not trace.converged

    def test_bad_arguments(self):
        toy = IntervalToy()
        with pytest.raises(ValueError):
            dinkelbach_solve(toy, None, as_point(2.0), tol=0.0)
        with pytest.raises(ValueError):
            dinkelbach_solve(toy, None, as_point(2.0), max_iter=0)

    def test_auxiliary_objective_matches_definition(self):
        toy = IntervalToy()
        for rho in (0.5, 1.0, 3.7):
            aux = toy.solve_auxiliary(rho, None)
            expected = toy.f1(aux.x, None) - rho * toy.f2(aux.x, None)
            assert aux.objective == pytest.approx(expected, rel=1e-10)


class TestGValue:
    def test_root_at_optimum(self):
        toy = IntervalToy()
        # min of x^2 - x on [1, 2] is attained at x = 1 with value 0.
        assert g_value(toy, 1.0, None) == pytest.approx(0.0, abs=1e-14)

    def test_sign_change_around_optimum(self):
        toy = IntervalToy()
        assert g_value(toy, 0.9, None) > 0.0
        assert g_value(toy, 1.1, None) < 0.0

    def test_nonpositive_at_any_feasible_ratio(self):
        toy = IntervalToy()
        rng = np.random.default_rng(0)
        for _ in range(25):
            x = as_point(rng.uniform(1.0, 2.0))
            assert g_value(toy, evaluate_ratio(toy, x, None), None) <= 1e-14

    def test_strictly_decreasing_on_grid(self):
        toy = IntervalToy()
        values = [g_value(toy, rho, None) for rho in np.linspace(0.2, 2.2, 15)]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestNewtonIdentity:
    def test_scalar_toy(self):
        toy = IntervalToy(0.5, 7.0)
        x, rho, trace = dinkelbach_solve(
            toy, None, as_point(6.0), tol=1e-14, max_iter=30, keep_iterates=True
        )
        seq = trace.rho_sequence
        for i in range(len(seq) - 1):
            x_next = trace.iterate_sequence[i + 1]
            newton = seq[i] - g_value(toy, seq[i], None) / (-toy.f2(x_next, None))
            assert seq[i + 1] == pytest.approx(newton, rel=1e-8)
