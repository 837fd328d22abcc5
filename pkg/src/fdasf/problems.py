"""Concrete fractional spatial-filtering problems.

Three problem families drive the experiments:

* trace-ratio: maximize tr(X^T R_vv X) / tr(X^T R_yy X) under X^T C X = I.
  Internally the negated ratio is minimized so that a single solver sign
  convention applies; ``report_sign = -1`` restores the conventional value.
* regularized total least squares: a quadratic-over-quadratic ratio in a
  vector filter with one quadratic inequality constraint.
* quadratic-over-linear: a toy family whose auxiliary problem has a closed
  form; its only constraint is the open condition ``f2 > 0``, monitored but
  never enforced (the constraint set is not compact, so convergence has no
  guarantee and is checked empirically).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .fracprog import AuxResult, FractionalProblem
from .kernels import gevd_top_q, gtrs_solve, match_column_signs

__all__ = [
    "TroData",
    "RtlsData",
    "QolData",
    "TroProblem",
    "RtlsProblem",
    "QolProblem",
    "tro_problem",
    "rtls_problem",
    "qol_problem",
]

_PD_FLOOR = 1e-12


def _check_spd(mat: np.ndarray, name: str, floor: float = _PD_FLOOR) -> None:
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.T).max() > 1e-12 * scale:
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(mat)[0] <= floor:
        raise ValueError(f"{name} must be positive definite")


def _check_psd(mat: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.T).max() > 1e-12 * scale:
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(mat)[0] < -1e-10 * scale:
        raise ValueError(f"{name} must be positive semidefinite")


@dataclass(frozen=True)
class TroData:
    r_vv: np.ndarray
    r_yy: np.ndarray
    metric: np.ndarray


@dataclass(frozen=True)
class RtlsData:
    r_yy: np.ndarray
    r_yd: np.ndarray
    r_dd: float
    identity_gram: np.ndarray
    l_gram: np.ndarray
    radius_sq: float = 1.0


@dataclass(frozen=True)
class QolData:
    r_yy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: float


class TroProblem(FractionalProblem):
    """Trace-ratio filter, minimized as the negated ratio.

    The auxiliary minimizer is the top-q generalized eigenvector basis of
    (r_vv + rho r_yy, metric); its solution set is the per-column sign orbit
    of that basis, and the warm start picks the closest orbit member.
    """

    report_sign = -1.0

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("q must be >= 1")
        self.q = q
        self.constraint_kinds = ("eq",) * (q * (q + 1) // 2)
        self._index_pairs = [
            (a, b) for a in range(q) for b in range(a, q)
        ]

    def f1(self, x, data) -> float:
        return -float(np.sum(x * (data.r_vv @ x)))

    def f2(self, x, data) -> float:
        return float(np.sum(x * (data.r_yy @ x)))

    def solve_auxiliary(self, rho, data, warm_start=None) -> AuxResult:
        s = data.r_vv + rho * data.r_yy
        x = gevd_top_q(s, data.metric, self.q)
        if warm_start is not None:
            x = match_column_signs(x, warm_start)
        gram_err = float(
            np.linalg.norm(x.T @ data.metric @ x - np.eye(self.q))
        )
        return AuxResult(x, self.f_value(x, rho, data), residual=gram_err)

    def f_gradient(self, x, rho, data):
        return -2.0 * (data.r_vv @ x) - rho * 2.0 * (data.r_yy @ x)

    def constraint_values(self, x, data):
        gram = x.T @ data.metric @ x - np.eye(self.q)
        return np.array([gram[a, b] for a, b in self._index_pairs])

    def constraint_gradients(self, x, data):
        cx = data.metric @ x
        grads = []
        for a, b in self._index_pairs:
            grad = np.zeros_like(x)
            grad[:, a] += cx[:, b]
            grad[:, b] += cx[:, a]
            grads.append(grad)
        return grads

    def constraint_residual(self, x, data) -> float:
        return float(np.linalg.norm(x.T @ data.metric @ x - np.eye(self.q)))


class RtlsProblem(FractionalProblem):
    """Regularized total-least-squares filter (vector variable, q = 1)."""

    q = 1
    constraint_kinds = ("ineq",)

    def f1(self, x, data) -> float:
        v = x[:, 0]
        return float(v @ (data.r_yy @ v) - 2.0 * v @ data.r_yd[:, 0] + data.r_dd)

    def f2(self, x, data) -> float:
        v = x[:, 0]
        return float(1.0 + v @ (data.identity_gram @ v))

    def solve_auxiliary(self, rho, data, warm_start=None) -> AuxResult:
        h = data.r_yy - rho * data.identity_gram
        x = gtrs_solve(h, data.r_yd[:, 0], data.l_gram, data.radius_sq)[:, None]
        return AuxResult(x, self.f_value(x, rho, data))

    def f_gradient(self, x, rho, data):
        return 2.0 * (data.r_yy @ x - data.r_yd) - rho * 2.0 * (
            data.identity_gram @ x
        )

    def constraint_values(self, x, data):
        v = x[:, 0]
        return np.array([float(v @ (data.l_gram @ v)) - data.radius_sq])

    def constraint_gradients(self, x, data):
        return [2.0 * (data.l_gram @ x)]


class QolProblem(FractionalProblem):
    """Quadratic-over-linear toy problem with a closed-form auxiliary solve.

    The open domain condition ``f2 > 0`` carries no multiplier; auxiliary
    solutions violating it are still returned, flagged via ``domain_ok``.
    """

    constraint_kinds = ()

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("q must be >= 1")
        self.q = q

    def f1(self, x, data) -> float:
        return float(np.sum(x * (data.r_yy @ x)) + np.sum(x * data.a))

    def f2(self, x, data) -> float:
        return float(np.sum(x * data.b) + data.c)

    def solve_auxiliary(self, rho, data, warm_start=None) -> AuxResult:
        x = 0.5 * np.linalg.solve(data.r_yy, rho * data.b - data.a)
        return AuxResult(
            x,
            self.f_value(x, rho, data),
            domain_ok=self.f2(x, data) > 0.0,
        )

    def f_gradient(self, x, rho, data):
        return 2.0 * (data.r_yy @ x) + data.a - rho * data.b

    def constraint_residual(self, x, data) -> float:
        return max(0.0, -self.f2(x, data))

    def domain_ok(self, x, data) -> bool:
        return self.f2(x, data) > 0.0


def tro_problem(data: TroData, q: int) -> TroProblem:
    """Validate trace-ratio data and build the problem."""
    _check_spd(data.r_vv, "r_vv")
    _check_spd(data.r_yy, "r_yy")
    _check_spd(data.metric, "metric")
    if data.r_vv.shape != data.r_yy.shape or data.metric.shape != data.r_yy.shape:
        raise ValueError("matrix sizes must match")
    return TroProblem(q)


def rtls_problem(data: RtlsData, q: int = 1) -> RtlsProblem:
    """Validate RTLS data and build the problem; only vector filters exist."""
    if q != 1:
        raise ValueError("the RTLS filter is a vector (q = 1)")
    _check_spd(data.r_yy, "r_yy")
    _check_psd(data.identity_gram, "identity_gram")
    _check_psd(data.l_gram, "l_gram")
    if data.r_dd <= 0.0:
        raise ValueError("r_dd must be positive")
    if data.r_yd.shape != (data.r_yy.shape[0], 1):
        raise ValueError("r_yd must be a column vector matching r_yy")
    return RtlsProblem()


def qol_feasibility_bounds(data: QolData) -> tuple[float, float]:
    """The two admissible ranges for 2c: (lower branch max, upper branch min)."""
    factor = cho_factor(data.r_yy)
    ra = cho_solve(factor, data.a)
    rb = cho_solve(factor, data.b)
    cross = float(np.sum(data.a * rb))
    root = float(np.sqrt(np.sum(data.a * ra) * np.sum(data.b * rb)))
    return cross - root, cross + root


def qol_problem(data: QolData, q: int | None = None) -> QolProblem:
    """Validate the quadratic-over-linear data and build the problem.

    The scalar offset must satisfy one of the two feasibility branches
    (2c above or below the discriminant bounds), otherwise the optimal
    ratio is not real.
    """
    _check_spd(data.r_yy, "r_yy")
    if data.a.shape != data.b.shape or data.a.shape[0] != data.r_yy.shape[0]:
        raise ValueError("a and b must be M x Q with M matching r_yy")
    lo, hi = qol_feasibility_bounds(data)
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    if not (2.0 * data.c >= hi - slack or 2.0 * data.c <= lo + slack):
        raise ValueError(
            f"infeasible offset: 2c = {2 * data.c:.6g} inside ({lo:.6g}, {hi:.6g})"
        )
    q_cols = data.a.shape[1]
    if q is not None and q != q_cols:
        raise ValueError("q disagrees with the column count of a/b")
    return QolProblem(q_cols)
