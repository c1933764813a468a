"""Monte Carlo estimation of smallest-Gram-eigenvalue probabilities, the
eigenvalue-based sample-complexity lower bound m_underline, and checks of the
asymptotic spectral edge.

Trials are independently seeded (base seed, trial index), so results are
identical for any worker count.  Within a trial, samples of different sizes
are nested prefixes of one stream, which makes the success indicator
{lambda_min(X_m X_m') >= m gamma^2} exactly non-increasing in m (Cauchy
interlacing on principal submatrices); the per-trial failure threshold can
therefore be located by bisection.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dist import DistributionSpec, sample


class MUnderlineNotFound(RuntimeError):
    """No m <= m_max had estimated success probability below 1/2."""

    def __init__(self, last_estimate):
        self.last_estimate = last_estimate
        super().__init__(
            f"success probability stayed >= 1/2 up to m={last_estimate.m} "
            f"(prob {last_estimate.prob:.3f}); increase m_max")


@dataclass(frozen=True)
class EigenProbEstimate:
    m: int
    gamma: float
    prob: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int


@dataclass(frozen=True)
class MUnderlineResult:
    m_underline: int
    first_failing_m: int
    grid: tuple
    estimates: tuple  # per-m EigenProbEstimate


@dataclass(frozen=True)
class EdgeCompareReport:
    empirical_mean: float
    predicted: float
    rel_error: float


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _lambda_min(points: np.ndarray) -> float:
    G = points @ points.T
    return float(np.linalg.eigvalsh(G)[0])


def _map_trials(fn, trials: int, workers: int):
    """Apply fn to each trial index; result order fixed by index."""
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(trials)))


def estimate_shatter_prob(spec: DistributionSpec, gamma: float, m: int,
                          trials: int, seed: int, workers: int = 1) -> EigenProbEstimate:
    """P[lambda_min(XX') >= m gamma^2] over `trials` independent m-samples."""
    if trials < 1 or m < 1:
        raise ValueError("trials and m must be >= 1")
    thresh = m * gamma * gamma

    def one(t: int) -> bool:
        pts = sample(spec, m, seed, stream=t).points
        return _lambda_min(pts) >= thresh

    successes = sum(_map_trials(one, trials, workers))
    lo, hi = wilson_interval(successes, trials)
    return EigenProbEstimate(m=m, gamma=float(gamma), prob=successes / trials,
                             ci_low=lo, ci_high=hi, trials=trials, seed=seed)


def _trial_threshold(spec: DistributionSpec, gamma: float, m_max: int,
                     seed: int, stream: int) -> int:
    """Smallest failing m for one nested-sample trial, in [1, m_max + 1].

    m_max + 1 means no failure up to m_max.  Valid because the success
    indicator is non-increasing in m pathwise under nested sampling.
    """
    pts = sample(spec, m_max, seed, stream=stream).points
    g2 = gamma * gamma

    def success(m: int) -> bool:
        return _lambda_min(pts[:m]) >= m * g2

    if success(m_max):
        return m_max + 1
    lo, hi = 0, m_max  # success(lo) true by convention, success(hi) false
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if success(mid):
            lo = mid
        else:
            hi = mid
    return hi


def m_underline(spec: DistributionSpec, gamma: float, m_max: int,
                trials: int, seed: int, workers: int = 1) -> MUnderlineResult:
    """Half the minimal m at which the shatter probability drops below 1/2."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")

    thresholds = _map_trials(
        lambda t: _trial_threshold(spec, gamma, m_max, seed, t), trials, workers)
    thresholds = np.array(thresholds)

    estimates = []
    first_failing = None
    for m in range(1, m_max + 1):
        successes = int(np.sum(thresholds > m))
        lo, hi = wilson_interval(successes, trials)
        est = EigenProbEstimate(m=m, gamma=float(gamma), prob=successes / trials,
                                ci_low=lo, ci_high=hi, trials=trials, seed=seed)
        estimates.append(est)
        if first_failing is None and est.prob < 0.5:
            first_failing = m
    if first_failing is None:
        raise MUnderlineNotFound(estimates[-1])
    return MUnderlineResult(m_underline=first_failing // 2,
                            first_failing_m=first_failing,
                            grid=tuple(range(1, m_max + 1)),
                            estimates=tuple(estimates))


def asymptotic_edge(sigma: float, beta: float) -> float:
    """Limiting smallest eigenvalue sigma^2 (1 - sqrt(beta))^2 of (1/d) XX'."""
    if not (0 < beta < 1):
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    return sigma * sigma * (1.0 - math.sqrt(beta)) ** 2


def edge_mc_compare(spec: DistributionSpec, beta: float, d: int,
                    trials: int, seed: int, workers: int = 1) -> EdgeCompareReport:
    """Empirical mean of lambda_min(XX')/d against the asymptotic edge."""
    kinds = {l.kind for l in spec.laws}
    if len(kinds) != 1 or spec.rotation is not None or np.ptp(spec.variances) != 0:
        raise ValueError("edge comparison requires iid coordinates (one law kind, "
                         "equal variances, no rotation)")
    if spec.d != d:
        raise ValueError(f"spec dimension {spec.d} != d={d}")
    m = round(beta * d)
    if not (1 <= m < d):
        raise ValueError(f"beta={beta} gives m={m}, need 1 <= m < d")
    sigma = math.sqrt(float(spec.variances[0]))
    predicted = asymptotic_edge(sigma, m / d)

    def one(t: int) -> float:
        pts = sample(spec, m, seed, stream=t).points
        return _lambda_min(pts) / d

    vals = _map_trials(one, trials, workers)
    emp = float(np.mean(vals))
    return EdgeCompareReport(empirical_mean=emp, predicted=predicted,
                             rel_error=abs(emp - predicted) / predicted)


def write_prob_curve_csv(path, estimates) -> None:
    """Emit probability estimates as CSV: m, gamma, prob, ci_low, ci_high, trials, seed."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["m", "gamma", "prob", "ci_low", "ci_high", "trials", "seed"])
        for e in estimates:
            w.writerow([e.m, repr(e.gamma), repr(e.prob), repr(e.ci_low),
                        repr(e.ci_high), e.trials, e.seed])
