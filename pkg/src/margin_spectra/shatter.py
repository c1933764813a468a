"""Exact fat-shattering certification of finite point sets.

A set of m points (rows of X) is shattered at the origin with margin gamma iff
the Gram matrix of X/gamma is invertible and the quadratic form
y' (XX'/gamma^2)^{-1} y stays <= 1 over all sign vectors y.  Enumeration over
the 2^(m-1) sign classes gives an exact verdict; the smallest Gram eigenvalue
gives a cheap one-sided sufficient condition.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .optim import (
    SINGULARITY_RATIO,
    ConstraintSystem,
    min_norm_interpolator,
    solve_min_norm_ineq,
)
from .spectral import set_limit_certificate

DEFAULT_CAP = 20
SUBSET_BUDGET = 10_000_000
WORST_VALUE_SLACK = 1e-9
_CHUNK = 1 << 16


class EnumerationCapError(ValueError):
    """Point count exceeds the exact-enumeration cap."""


class SubsetBudgetError(ValueError):
    """Combinatorial subset budget exceeded; retry with a smaller max_subset."""


@dataclass(frozen=True)
class SampleMatrix:
    rows: np.ndarray

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if not np.all(np.isfinite(r)):
            raise ValueError("sample matrix entries must be finite")
        object.__setattr__(self, "rows", r)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass
class ShatterCertificate:
    shattered: bool
    gamma: float
    worst_labeling: np.ndarray | None
    worst_value: float
    gram_condition: float
    witnesses: dict | None = None

    def to_dict(self) -> dict:
        return {
            "shattered": self.shattered,
            "gamma": self.gamma,
            "worst_labeling": None if self.worst_labeling is None
            else [int(v) for v in self.worst_labeling],
            "worst_value": self.worst_value,
            "gram_condition": self.gram_condition,
            "witnesses": None if self.witnesses is None
            else {k: [float(v) for v in w] for k, w in self.witnesses.items()},
        }


@dataclass(frozen=True)
class FatShatteringEstimate:
    lower: int
    upper: int
    witness_subset: tuple
    gamma: float


def _sign_block(m: int, start: int, count: int) -> np.ndarray:
    """Rows `start..start+count` of the {+-1}^m enumeration with y[0] = +1."""
    idx = np.arange(start, start + count, dtype=np.uint64)[:, None]
    bits = (idx >> np.arange(m - 1, dtype=np.uint64)[None, ::-1]) & 1
    y = np.empty((count, m))
    y[:, 0] = 1.0
    y[:, 1:] = 1.0 - 2.0 * bits
    return y


def shatter_at_origin(X: SampleMatrix | np.ndarray, gamma: float,
                      cap: int = DEFAULT_CAP) -> ShatterCertificate:
    """Exact origin-shattering verdict at margin gamma by labeling enumeration.

    Since y and -y give the same quadratic form, only 2^(m-1) labelings are
    evaluated.  Gram singularity (including m > d) yields a not-shattered
    verdict with the offending eigenvalue ratio in `gram_condition`.
    """
    if not isinstance(X, SampleMatrix):
        X = SampleMatrix(X)
    if not (gamma > 0):
        raise ValueError(f"gamma must be positive, got {gamma}")
    m = X.m
    if m > cap:
        raise EnumerationCapError(f"m={m} exceeds enumeration cap {cap}")
    Xs = X.rows / gamma
    G = Xs @ Xs.T
    evals, evecs = np.linalg.eigh(G)
    lam_max = float(evals[-1])
    ratio = 0.0 if lam_max <= 0 else float(evals[0]) / lam_max
    if m > X.d or ratio <= SINGULARITY_RATIO:
        return ShatterCertificate(shattered=False, gamma=float(gamma),
                                  worst_labeling=None, worst_value=math.inf,
                                  gram_condition=ratio)
    total = 1 << (m - 1)
    worst = -math.inf
    worst_y = None
    for start in range(0, total, _CHUNK):
        count = min(_CHUNK, total - start)
        y = _sign_block(m, start, count)
        c = y @ evecs
        vals = np.sum(c * c / evals, axis=1)
        i = int(np.argmax(vals))
        if vals[i] > worst:
            worst = float(vals[i])
            worst_y = y[i].copy()
    return ShatterCertificate(shattered=worst <= 1.0 + WORST_VALUE_SLACK,
                              gamma=float(gamma), worst_labeling=worst_y,
                              worst_value=worst, gram_condition=ratio)


def shatter_witness(X: SampleMatrix | np.ndarray, gamma: float, y: np.ndarray) -> np.ndarray:
    """Separator w with ||w|| <= 1 and y_i <x_i, w> = gamma for a shattered set."""
    if not isinstance(X, SampleMatrix):
        X = SampleMatrix(X)
    y = np.asarray(y, dtype=float)
    return min_norm_interpolator(X.rows / gamma, y)


def lambda_min_sufficient(X: SampleMatrix | np.ndarray, gamma: float) -> bool:
    """Sufficient condition: smallest Gram eigenvalue >= m * gamma^2.

    One-directional: True implies origin-shattering at margin gamma; False is
    inconclusive.
    """
    if not isinstance(X, SampleMatrix):
        X = SampleMatrix(X)
    G = X.rows @ X.rows.T
    lam_min = float(np.linalg.eigvalsh(G)[0])
    return lam_min >= X.m * gamma * gamma


def shatter_with_offsets(X: SampleMatrix | np.ndarray, r: np.ndarray, gamma: float,
                         cap: int = DEFAULT_CAP) -> bool:
    """Shattering with caller-supplied offsets r, decided labeling by labeling.

    Each labeling y requires some w with ||w|| <= 1 and
    y_i(<x_i, w> - r_i) >= gamma, i.e. the min-norm point under the
    constraints (y_i x_i) . w >= gamma + y_i r_i must have norm <= 1.
    """
    if not isinstance(X, SampleMatrix):
        X = SampleMatrix(X)
    r = np.asarray(r, dtype=float)
    m = X.m
    if m > cap:
        raise EnumerationCapError(f"m={m} exceeds enumeration cap {cap}")
    for mask in range(1 << m):
        y = 1.0 - 2.0 * ((mask >> np.arange(m)) & 1)
        cs = ConstraintSystem(y[:, None] * X.rows, gamma + y * r)
        sol = solve_min_norm_ineq(cs)
        if sol.status != "optimal" or sol.objective > 1.0 + 1e-8:
            return False
    return True


def fat_shattering_upper_bound(points: SampleMatrix | np.ndarray, gamma: float) -> int:
    """floor of min over k of (3/2)(b_k / gamma^2 + k + 1), b_k from the
    top-k principal-subspace certificate."""
    if not isinstance(points, SampleMatrix):
        points = SampleMatrix(points)
    g2 = gamma * gamma
    best = math.inf
    for k in range(points.d + 1):
        cert = set_limit_certificate(points.rows, k)
        best = min(best, 1.5 * (cert.b / g2 + k + 1))
    return int(math.floor(best + 1e-9))


def fat_shattering_search(points: SampleMatrix | np.ndarray, gamma: float,
                          max_subset: int, cap: int = DEFAULT_CAP) -> FatShatteringEstimate:
    """Bracket the fat-shattering dimension of a finite set.

    Lower bound: size of the largest subset certified origin-shattered by
    exhaustive subset enumeration (largest sizes first).  Upper bound: the
    projection-limit formula.  lower <= upper is guaranteed by the theory; a
    violation is a library defect.
    """
    if not isinstance(points, SampleMatrix):
        points = SampleMatrix(points)
    if max_subset > cap:
        raise EnumerationCapError(f"max_subset={max_subset} exceeds cap {cap}")
    m = points.m
    smax = min(max_subset, m, points.d)
    n_subsets = sum(math.comb(m, s) for s in range(1, smax + 1))
    if n_subsets > SUBSET_BUDGET:
        raise SubsetBudgetError(
            f"{n_subsets} candidate subsets exceed budget {SUBSET_BUDGET}; "
            f"reduce max_subset")
    upper = fat_shattering_upper_bound(points, gamma)
    for s in range(smax, 0, -1):
        for subset in combinations(range(m), s):
            cert = shatter_at_origin(points.rows[list(subset)], gamma, cap=cap)
            if cert.shattered:
                return FatShatteringEstimate(lower=s, upper=upper,
                                             witness_subset=subset, gamma=float(gamma))
    return FatShatteringEstimate(lower=0, upper=upper, witness_subset=(), gamma=float(gamma))


def read_points_csv(path) -> SampleMatrix:
    """Read a point set from CSV: one point per row, numeric columns."""
    with open(path, newline="") as f:
        rows = [[float(v) for v in r] for r in csv.reader(f) if r]
    return SampleMatrix(np.array(rows))


def write_points_csv(path, points: SampleMatrix) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        for row in points.rows:
            w.writerow([repr(float(v)) for v in row])
