"""Fractional programs and the parametric (Dinkelbach) solver.

A fractional program minimizes ``r(X) = f1(X) / f2(X)`` over a constraint
set on which ``f2`` is strictly positive.  The parametric method repeatedly
minimizes the auxiliary objective ``f(X, rho) = f1(X) - rho f2(X)`` and
updates ``rho`` to the ratio at the new minimizer; it is Newton root-finding
on the strictly decreasing function ``g(rho) = min f(X, rho)``, whose unique
root is the optimal ratio.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AuxResult",
    "DinkelbachTrace",
    "FractionalProblem",
    "FracprogError",
    "NonPositiveDenominatorError",
    "SolverFailure",
    "evaluate_ratio",
    "dinkelbach_solve",
    "g_value",
]


class FracprogError(Exception):
    """Base error for fractional-program solvers."""


class NonPositiveDenominatorError(FracprogError):
    """f2 evaluated to a non-positive value (feasibility violation)."""


class SolverFailure(FracprogError):
    """An auxiliary solver could not produce a valid minimizer."""


@dataclass
class AuxResult:
    """Outcome of one auxiliary minimization ``min f(X, rho)``."""

    x: np.ndarray
    objective: float
    iterations: int = 1
    residual: float = 0.0
    domain_ok: bool = True


@dataclass
class DinkelbachTrace:
    rho_sequence: list[float] = field(default_factory=list)
    aux_solve_count: int = 0
    iterate_sequence: list[np.ndarray] | None = None
    converged: bool = False


class FractionalProblem(abc.ABC):
    """A ratio objective with constraints, generic over problem data.

    Every method takes the problem data explicitly, so the same instance
    describes both the network-wide problem and its compressed local
    counterparts (which share the functional form but act on compressed
    data).  ``report_sign`` maps the internal minimized ratio to the
    conventionally reported one (-1 for problems stated as maximizations).
    """

    q: int
    constraint_kinds: tuple[str, ...] = ()
    report_sign: float = 1.0

    @abc.abstractmethod
    def f1(self, x: np.ndarray, data) -> float: ...

    @abc.abstractmethod
    def f2(self, x: np.ndarray, data) -> float: ...

    @abc.abstractmethod
    def solve_auxiliary(
        self, rho: float, data, warm_start: np.ndarray | None = None
    ) -> AuxResult: ...

    @abc.abstractmethod
    def f_gradient(self, x: np.ndarray, rho: float, data) -> np.ndarray: ...

    def constraint_values(self, x: np.ndarray, data) -> np.ndarray:
        return np.empty(0)

    def constraint_gradients(self, x: np.ndarray, data) -> list[np.ndarray]:
        return []

    def ratio(self, x: np.ndarray, data) -> float:
        den = self.f2(x, data)
        if den <= 0.0:
            raise NonPositiveDenominatorError(
                f"f2 = {den!r} is not strictly positive"
            )
        return self.f1(x, data) / den

    def f_value(self, x: np.ndarray, rho: float, data) -> float:
        return self.f1(x, data) - rho * self.f2(x, data)

    def constraint_residual(self, x: np.ndarray, data) -> float:
        """Worst violation: |h| for equalities, max(0, h) for inequalities."""
        values = self.constraint_values(x, data)
        worst = 0.0
        for h, kind in zip(values, self.constraint_kinds):
            viol = abs(h) if kind == "eq" else max(0.0, h)
            worst = max(worst, float(viol))
        return worst


def evaluate_ratio(problem: FractionalProblem, x: np.ndarray, data) -> float:
    """Ratio f1/f2 at ``x``; raises if the denominator is not positive."""
    return problem.ratio(x, data)


def dinkelbach_solve(
    problem: FractionalProblem,
    data,
    x0: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 10,
    keep_iterates: bool = False,
) -> tuple[np.ndarray, float, DinkelbachTrace]:
    """Run the parametric procedure from a feasible start.

    The parameter is always initialized as ``rho = r(x0)``.  Each round
    minimizes the auxiliary objective at the current ratio (the previous
    iterate is passed as warm start and tie-break reference) and stops when
    the Frobenius change of the iterate drops below ``tol`` or ``max_iter``
    auxiliary solves have been spent.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x = np.asarray(x0, dtype=float)
    rho = problem.ratio(x, data)
    trace = DinkelbachTrace(rho_sequence=[rho])
    if keep_iterates:
        trace.iterate_sequence = [x.copy()]
    for _ in range(max_iter):
        aux = problem.solve_auxiliary(rho, data, warm_start=x)
        trace.aux_solve_count += 1
        x_new = aux.x
        rho_new = problem.ratio(x_new, data)
        trace.rho_sequence.append(rho_new)
        if keep_iterates:
            trace.iterate_sequence.append(x_new.copy())
        step = float(np.linalg.norm(x_new - x))
        x, rho = x_new, rho_new
        if step < tol:
            trace.converged = True
            break
    return x, rho, trace


def g_value(problem: FractionalProblem, rho: float, data) -> float:
    """Minimal auxiliary objective ``g(rho)``; zero exactly at the optimum."""
    return problem.solve_auxiliary(rho, data).objective
