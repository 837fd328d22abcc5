"""Dense symmetric-eigen and trust-region kernels for the auxiliary solvers."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular
from scipy.optimize import brentq

from .fracprog import SolverFailure

__all__ = [
    "DegenerateSpectrumWarning",
    "NotPositiveDefiniteError",
    "evd_top_q",
    "gevd_top_q",
    "gtrs_solve",
    "fix_column_signs",
    "match_column_signs",
]

_GAP_WARN = 1e-10


class DegenerateSpectrumWarning(UserWarning):
    """The eigenvalue separating the kept subspace is nearly degenerate."""


class NotPositiveDefiniteError(SolverFailure):
    """A matrix required to be positive definite failed its factorization."""


def _check_symmetric(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square")
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.T).max() > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (mat + mat.T)


def fix_column_signs(x: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive.

    Magnitude ties resolve to the first index, keeping the reachable output
    set finite even for symmetric spectra.
    """
    x = np.array(x, dtype=float)
    for j in range(x.shape[1]):
        col = x[:, j]
        idx = int(np.argmax(np.abs(col)))
        if col[idx] < 0.0:
            x[:, j] = -col
    return x


def match_column_signs(x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Per-column sign choice minimizing distance to ``reference``.

    Columns orthogonal to their reference column (tied distance) keep the
    incoming sign convention.
    """
    x = np.array(x, dtype=float)
    for j in range(x.shape[1]):
        if float(x[:, j] @ reference[:, j]) < 0.0:
            x[:, j] = -x[:, j]
    return x


def evd_top_q(s: np.ndarray, q: int) -> np.ndarray:
    """Unit-norm eigenvectors of the ``q`` algebraically largest eigenvalues.

    Columns are ordered by descending eigenvalue with the deterministic sign
    convention of :func:`fix_column_signs`.  A nearly closed gap between the
    q-th and (q+1)-th eigenvalue is reported as a warning only.
    """
    s = _check_symmetric(s, "s")
    if not 1 <= q <= s.shape[0]:
        raise ValueError("q must lie in 1..dim")
    vals, vecs = eigh(s)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    if q < s.shape[0] and vals[q - 1] - vals[q] < _GAP_WARN:
        warnings.warn(
            f"eigenvalue gap {vals[q - 1] - vals[q]:.3e} below {_GAP_WARN:.0e}; "
            "the kept subspace is ill-determined",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    return fix_column_signs(vecs[:, :q])


def gevd_top_q(s: np.ndarray, c: np.ndarray, q: int) -> np.ndarray:
    """Top-``q`` generalized eigenvectors of (s, c), normalized X^T c X = I.

    Solved by Cholesky whitening of ``c`` followed by a symmetric EVD; a
    failed factorization signals an invalid (non-PD) metric.
    """
    s = _check_symmetric(s, "s")
    c = _check_symmetric(c, "c")
    try:
        g = cholesky(c, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("metric is not positive definite") from exc
    w = solve_triangular(g, s, lower=True)
    t = solve_triangular(g, w.T, lower=True)
    x_white = evd_top_q(0.5 * (t + t.T), q)
    x = solve_triangular(g, x_white, lower=True, trans="T")
    return fix_column_signs(x)


def gtrs_solve(
    h: np.ndarray,
    b: np.ndarray,
    g: np.ndarray,
    radius_sq: float = 1.0,
) -> np.ndarray:
    """Global minimizer of ``x^T h x - 2 b^T x`` s.t. ``x^T g x <= radius_sq``.

    ``h`` may be indefinite; ``g`` must be positive definite so the feasible
    ellipsoid is compact.  The KKT point is found on the whitened problem:
    interior solutions are returned directly when ``h`` is PD, otherwise the
    multiplier solves the secular equation ``||z(mu)|| = 1`` by safeguarded
    bracketing, with the hard case (right-hand side orthogonal to the bottom
    eigenspace) resolved by adding a boundary-reaching eigenvector component.
    """
    h = _check_symmetric(h, "h")
    b = np.asarray(b, dtype=float).reshape(-1)
    if radius_sq <= 0.0:
        raise ValueError("radius_sq must be positive")
    g = _check_symmetric(g, "g") / radius_sq
    try:
        chol = cholesky(g, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "constraint matrix is not positive definite; problem may be unbounded"
        ) from exc

    w = solve_triangular(chol, h, lower=True)
    h_white = solve_triangular(chol, w.T, lower=True)
    h_white = 0.5 * (h_white + h_white.T)
    b_white = solve_triangular(chol, b, lower=True)

    lam, vecs = eigh(h_white)
    beta = vecs.T @ b_white

    def to_original(z: np.ndarray) -> np.ndarray:
        return solve_triangular(chol, z, lower=True, trans="T")

    # Interior solution when the whitened Hessian is PD.
    if lam[0] > 0.0:
        z = vecs @ (beta / lam)
        if float(z @ z) <= 1.0 + 1e-12:
            return to_original(z)

    def norm_sq(mu: float) -> float:
        return float(np.sum((beta / (lam + mu)) ** 2))

    mu_floor = max(0.0, -lam[0])
    probe = mu_floor + 1e-13 * max(1.0, mu_floor)
    if norm_sq(probe) <= 1.0:
        # Hard case: no interior-to-boundary crossing right of the floor.
        denom = lam + mu_floor
        keep = np.abs(denom) > 1e-12 * max(1.0, float(np.abs(lam).max()))
        coeff = np.zeros_like(beta)
        coeff[keep] = beta[keep] / denom[keep]
        z = vecs @ coeff
        if mu_floor > 0.0:
            # Boundary is mandatory; pad with the bottom eigenvector.
            tau = np.sqrt(max(0.0, 1.0 - float(z @ z)))
            bottom = fix_column_signs(vecs[:, :1])[:, 0]
            z = z + tau * bottom
        return to_original(z)

    lo = probe
    hi = mu_floor + float(np.linalg.norm(b_white)) + abs(lam[-1]) + 1.0
    for _ in range(200):
        if norm_sq(hi) < 1.0:
            break
        hi *= 2.0
    else:
        raise SolverFailure("secular bracket expansion failed")

    def secular(mu: float) -> float:
        return 1.0 - 1.0 / np.sqrt(norm_sq(mu))

    mu = brentq(secular, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
    z = vecs @ (beta / (lam + mu))
    return to_original(z)
