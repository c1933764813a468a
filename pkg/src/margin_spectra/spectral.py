"""Adapted dimension and projection-limit certificates from covariance spectra.

The central quantity is the margin-adapted dimension of a spectrum
``lambda_1 >= ... >= lambda_d``: the minimal ``k`` such that the eigenvalue
tail beyond ``k`` is at most ``gamma^2 * k``.  For finite point sets the
analogous object is a (b, k) certificate: a (d-k)-dimensional subspace onto
which every point projects with squared norm at most b.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class SpectrumValidationError(ValueError):
    """Raised for malformed spectra or out-of-range parameters."""


@dataclass(frozen=True)
class CovarianceSpectrum:
    """Eigenvalues of a covariance matrix, sorted descending."""

    eigenvalues: np.ndarray
    dimension: int = field(init=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise SpectrumValidationError("spectrum must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(ev)):
            raise SpectrumValidationError("spectrum entries must be finite")
        if np.any(ev < 0):
            raise SpectrumValidationError("spectrum entries must be non-negative")
        if np.any(np.diff(ev) > 0):
            raise SpectrumValidationError("spectrum must be sorted non-increasing")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "dimension", int(ev.size))

    @property
    def trace(self) -> float:
        return float(self.eigenvalues.sum())


@dataclass(frozen=True)
class AdaptedDimResult:
    k: int
    gamma: float
    tail_sum: float


@dataclass(frozen=True)
class LimitCertificate:
    b: float
    k: int
    subspace_basis: np.ndarray  # (d-k) x d orthonormal rows


@dataclass(frozen=True)
class GrowthBoundReport:
    k_gamma: int
    k_alphagamma: int
    holds: bool


def _tail_tol(trace: float) -> float:
    # summation-order slack for the tail inequality
    return 1e-12 * max(1.0, trace)


def k_gamma(spectrum: CovarianceSpectrum, gamma: float) -> AdaptedDimResult:
    """Minimal k with sum of eigenvalues beyond k at most gamma^2 * k."""
    if not (gamma > 0):
        raise SpectrumValidationError(f"gamma must be positive, got {gamma}")
    ev = spectrum.eigenvalues
    tol = _tail_tol(spectrum.trace)
    # tails[k] = sum of eigenvalues with index > k (0-based: ev[k:] summed from k)
    tails = np.concatenate([np.cumsum(ev[::-1])[::-1], [0.0]])
    g2 = gamma * gamma
    for k in range(spectrum.dimension + 1):
        if tails[k] <= g2 * k + tol:
            return AdaptedDimResult(k=k, gamma=float(gamma), tail_sum=float(tails[k]))
    raise AssertionError("unreachable: k = d always satisfies the tail condition")


def b_for_k(spectrum: CovarianceSpectrum, k: int) -> float:
    """Sum of the d-k smallest eigenvalues (minimal b for the distribution variant)."""
    if not (0 <= k <= spectrum.dimension):
        raise SpectrumValidationError(f"k must be in [0, {spectrum.dimension}], got {k}")
    return float(spectrum.eigenvalues[k:].sum())


def set_limit_certificate(points: np.ndarray, k: int) -> LimitCertificate:
    """Certify a point set as (b, k)-limited via the top-k principal subspace.

    Projects every point onto the orthogonal complement of the top-k right
    singular subspace and takes b as the maximum squared projected norm.  The
    certificate is valid but b is not guaranteed minimal over all subspaces.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 1:
        raise SpectrumValidationError("need at least one point")
    d = pts.shape[1]
    if not (0 <= k <= d):
        raise SpectrumValidationError(f"k must be in [0, {d}], got {k}")
    _, _, vt = np.linalg.svd(pts, full_matrices=True)
    basis = vt[k:]  # (d-k) x d, orthonormal rows
    if basis.shape[0] == 0:
        return LimitCertificate(b=0.0, k=k, subspace_basis=basis)
    proj = pts @ basis.T
    b = float(np.max(np.sum(proj * proj, axis=1)))
    return LimitCertificate(b=b, k=k, subspace_basis=basis)


def check_growth_bound(spectrum: CovarianceSpectrum, gamma: float, alpha: float) -> GrowthBoundReport:
    """Check k_gamma <= k_{alpha*gamma} <= 2 k_gamma / alpha^2 + 1."""
    if not (0 < alpha < 1):
        raise SpectrumValidationError(f"alpha must be in (0, 1), got {alpha}")
    kg = k_gamma(spectrum, gamma).k
    kag = k_gamma(spectrum, alpha * gamma).k
    holds = kg <= kag <= 2 * kg / (alpha * alpha) + 1
    return GrowthBoundReport(k_gamma=kg, k_alphagamma=kag, holds=bool(holds))


def read_spectrum_csv(path) -> CovarianceSpectrum:
    """Read a spectrum from CSV: header line ``eigenvalue``, one value per line."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["eigenvalue"]:
        raise SpectrumValidationError(f"{path}: expected header line 'eigenvalue'")
    values = [float(r[0]) for r in rows[1:] if r]
    return CovarianceSpectrum(np.array(values))


def write_spectrum_csv(path, spectrum: CovarianceSpectrum) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["eigenvalue"])
        for v in spectrum.eigenvalues:
            w.writerow([repr(float(v))])
