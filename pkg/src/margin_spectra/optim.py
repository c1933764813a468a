"""Minimum-norm solvers: exact interpolation via the Gram inverse and a small
dense active-set method for minimum-norm points under linear inequalities.

Both solvers share one symmetric eigendecomposition of the Gram matrix, so the
singularity diagnostic and the quadratic form y' (XX')^{-1} y come from the
same factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

SINGULARITY_RATIO = 1e-10
FEAS_TOL = 1e-8


class SingularGramError(np.linalg.LinAlgError):
    """Gram matrix is singular or near-singular; carries the eigenvalue ratio."""

    def __init__(self, ratio: float):
        self.ratio = ratio
        super().__init__(
            f"Gram matrix singular or near-singular: smallest/largest eigenvalue "
            f"ratio {ratio:.3e} <= {SINGULARITY_RATIO:.0e}"
        )


class IterationCapError(RuntimeError):
    """Active-set iteration cap exceeded (signals degeneracy)."""


@dataclass(frozen=True)
class ConstraintSystem:
    """Constraints a_i . w >= b_i with rows a_i in `matrix`."""

    matrix: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        b = np.atleast_1d(np.asarray(self.bounds, dtype=float))
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"{a.shape[0]} constraint rows but {b.shape[0]} bounds")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "bounds", b)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]


@dataclass
class QpSolution:
    w: np.ndarray | None
    objective: float
    active_set: list[int]
    kkt_residual: float
    status: str  # "optimal" | "infeasible"

    def to_dict(self) -> dict:
        return {
            "w": None if self.w is None else [float(v) for v in self.w],
            "objective": self.objective,
            "active_set": list(self.active_set),
            "kkt_residual": self.kkt_residual,
            "status": self.status,
        }


@dataclass(frozen=True)
class KktReport:
    stationarity_residual: float
    feasibility_violation: float
    multiplier_sign_ok: bool


def _gram_eig(X: np.ndarray):
    """Eigendecomposition of XX' with a singularity check on the eigenvalue ratio."""
    G = X @ X.T
    evals, evecs = np.linalg.eigh(G)
    lam_max = float(evals[-1]) if evals.size else 0.0
    ratio = 0.0 if lam_max <= 0 else float(evals[0]) / lam_max
    if ratio <= SINGULARITY_RATIO:
        raise SingularGramError(ratio)
    return evals, evecs


def min_norm_interpolator(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-norm w with Xw = y, i.e. w = X' (XX')^{-1} y.

    Requires m <= d and a well-conditioned Gram matrix; raises
    SingularGramError otherwise.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    evals, evecs = _gram_eig(X)
    ginv_y = evecs @ ((evecs.T @ y) / evals)
    return X.T @ ginv_y


def min_norm_quadratic_form(X: np.ndarray, y: np.ndarray) -> float:
    """y' (XX')^{-1} y, the squared norm of the least-norm interpolator."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    evals, evecs = _gram_eig(X)
    c = evecs.T @ y
    return float(np.sum(c * c / evals))


def _independent_rows(A: np.ndarray, idx: list[int]) -> list[int]:
    """Greedy subset of `idx` whose rows of A are linearly independent."""
    keep: list[int] = []
    for i in idx:
        trial = A[keep + [i]]
        if np.linalg.matrix_rank(trial, tol=1e-10) == len(keep) + 1:
            keep.append(i)
    return keep


def _equality_min_norm(A_w: np.ndarray, b_w: np.ndarray):
    """Min-norm w with A_w w = b_w, plus the expansion coefficients alpha."""
    G = A_w @ A_w.T
    alpha = np.linalg.solve(G, b_w)
    return A_w.T @ alpha, alpha


def solve_min_norm_ineq(cs: ConstraintSystem, max_iter: int | None = None) -> QpSolution:
    """Minimize ||w||^2 subject to a_i . w >= b_i by primal active-set iteration.

    Feasibility is established first by a phase-1 LP; the active-set loop then
    moves between equality-constrained minimizers, adding the blocking
    constraint (lowest index among ties) and dropping the most negative
    multiplier.
    """
    A, b = cs.matrix, cs.bounds
    n, d = cs.n, cs.d
    if max_iter is None:
        max_iter = 100 * (n + d)
    if n == 0:
        return QpSolution(w=np.zeros(d), objective=0.0, active_set=[],
                          kkt_residual=0.0, status="optimal")

    lp = linprog(np.zeros(d), A_ub=-A, b_ub=-b, bounds=[(None, None)] * d, method="highs")
    if lp.status != 0:
        return QpSolution(w=None, objective=float("inf"), active_set=[],
                          kkt_residual=float("inf"), status="infeasible")
    w = np.asarray(lp.x, dtype=float)

    scale = np.maximum(1.0, np.abs(b))
    slack = A @ w - b
    working = _independent_rows(A, [i for i in range(n) if slack[i] <= FEAS_TOL * scale[i]])

    for _ in range(max_iter):
        if working:
            w_star, alpha = _equality_min_norm(A[working], b[working])
        else:
            w_star, alpha = np.zeros(d), np.zeros(0)
        p = w_star - w
        if np.linalg.norm(p) <= 1e-11 * max(1.0, np.linalg.norm(w)):
            # at the equality-constrained optimum; check multiplier signs
            lam = 2.0 * alpha
            if lam.size == 0 or np.min(lam) >= -FEAS_TOL:
                w = w_star
                resid = np.linalg.norm(2.0 * w - (A[working].T @ lam if working else 0.0))
                return QpSolution(w=w, objective=float(w @ w),
                                  active_set=sorted(working),
                                  kkt_residual=float(resid), status="optimal")
            working.pop(int(np.argmin(lam)))
            continue
        # step toward w_star, blocked by the nearest violated constraint
        t = 1.0
        blocker = None
        for i in range(n):
            if i in working:
                continue
            ap = A[i] @ p
            if ap < -1e-13 * max(1.0, np.linalg.norm(A[i]) * np.linalg.norm(p)):
                ti = max((b[i] - A[i] @ w) / ap, 0.0)
                if ti < t - 1e-12:
                    t, blocker = ti, i
        w = w + t * p
        if blocker is not None:
            working.append(blocker)
            working.sort()
    raise IterationCapError(f"active-set iteration cap {max_iter} exceeded")


def kkt_check(sol: QpSolution, cs: ConstraintSystem) -> KktReport:
    """Recompute multipliers on the active set and report KKT residuals."""
    if sol.status != "optimal":
        raise ValueError(f"kkt_check requires an optimal solution, got status {sol.status!r}")
    A, b = cs.matrix, cs.bounds
    w = sol.w
    if sol.active_set:
        A_act = A[sol.active_set]
        lam, *_ = np.linalg.lstsq(A_act.T, 2.0 * w, rcond=None)
        stationarity = float(np.linalg.norm(A_act.T @ lam - 2.0 * w))
        sign_ok = bool(np.min(lam) >= -FEAS_TOL)
    else:
        stationarity = float(np.linalg.norm(2.0 * w))
        sign_ok = True
    violation = float(max(0.0, np.max(b - A @ w))) if cs.n else 0.0
    return KktReport(stationarity_residual=stationarity,
                     feasibility_violation=violation,
                     multiplier_sign_ok=sign_ok)
