"""Margin-error-minimization learners and learning-curve harnesses.

The exact learner enumerates which training points are required to meet the
margin (largest subsets first) and tests each pattern by a min-norm
feasibility solve, so it is a true empirical margin-loss minimizer.  The
adversarial learner realizes the lower-bound construction: on a shattered
train+test set it interpolates exact margins +gamma on the training labels
and -gamma on the designated test labels, achieving zero training margin loss
while misclassifying every test point.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dist import DistributionSpec, sample
from .optim import ConstraintSystem, min_norm_interpolator, solve_min_norm_ineq
from .shatter import SampleMatrix, shatter_at_origin

EXACT_CAP = 16
MARGIN_TOL = 1e-9


class ExactCapError(ValueError):
    """Exact mode is capped; use heuristic mode for larger samples."""


class NotShatteredError(RuntimeError):
    """Adversarial construction requires the combined set to be shattered."""


class DegenerateSampleError(ValueError):
    """Sample does not admit the requested learner (missing class, zero means)."""


@dataclass(frozen=True)
class LabeledSample:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        y = np.atleast_1d(np.asarray(self.labels, dtype=float))
        if pts.shape[0] != y.size:
            raise ValueError("points/labels length mismatch")
        if not np.all(np.abs(y) == 1.0):
            raise ValueError("labels must be +-1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", y)

    @property
    def m(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class LearnerOutput:
    w: np.ndarray
    train_margin_loss: float
    mode: str  # "exact" | "heuristic"
    optimality_certified: bool


@dataclass(frozen=True)
class CurveEntry:
    m: int
    mean_test_error: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class LearningCurve:
    gamma: float
    entries: tuple
    learner_kind: str
    distribution_digest: str
    lstar: float | None  # margin-loss proxy of the known best separator, if any
    seed: int


def margin_loss(w: np.ndarray, S: LabeledSample, gamma: float) -> float:
    """Fraction of points with functional margin below gamma (tolerance
    MARGIN_TOL, so exact-margin points count as satisfied)."""
    margins = S.labels * (S.points @ w)
    return float(np.mean(margins < gamma - MARGIN_TOL * max(1.0, gamma)))


def _pattern_feasible(S: LabeledSample, pattern, gamma: float):
    """Min-norm w meeting margin gamma on the given index pattern, or None."""
    if len(pattern) == 0:
        return np.zeros(S.points.shape[1])
    idx = list(pattern)
    rows = S.labels[idx, None] * S.points[idx]
    sol = solve_min_norm_ineq(ConstraintSystem(rows, np.full(len(idx), gamma)))
    if sol.status != "optimal" or sol.objective > 1.0 + 1e-8:
        return None
    return sol.w


def margin_error_minimize(S: LabeledSample, gamma: float, mode: str = "exact",
                          seed: int = 0) -> LearnerOutput:
    """Unit-ball predictor minimizing the empirical margin loss at gamma."""
    if mode == "exact":
        if S.m > EXACT_CAP:
            raise ExactCapError(
                f"exact mode capped at m={EXACT_CAP}, got {S.m}; use heuristic mode")
        for size in range(S.m, -1, -1):
            for pattern in combinations(range(S.m), size):
                w = _pattern_feasible(S, pattern, gamma)
                if w is not None:
                    nrm = float(np.linalg.norm(w))
                    if nrm > 0:
                        w = w / nrm  # scaling up never hurts satisfied margins
                    return LearnerOutput(w=w, train_margin_loss=margin_loss(w, S, gamma),
                                         mode="exact", optimality_certified=True)
        raise AssertionError("unreachable: empty pattern is always feasible")
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")
    w = _hinge_subgradient(S, gamma, seed)
    return LearnerOutput(w=w, train_margin_loss=margin_loss(w, S, gamma),
                         mode="heuristic", optimality_certified=False)


def _hinge_subgradient(S: LabeledSample, gamma: float, seed: int,
                       restarts: int = 10, iters: int = 300) -> np.ndarray:
    """Projected subgradient descent on the hinge-at-gamma surrogate.

    Keeps the best iterate seen (by 0-1 margin loss, then hinge value) across
    all restarts, comparing both the raw and unit-normalized iterate.
    """
    X, y, m = S.points, S.labels, S.m
    rng = np.random.default_rng([seed, 0x6d61725f])
    row_scale = float(np.mean(np.linalg.norm(X, axis=1))) or 1.0
    best_w, best_key = np.zeros(X.shape[1]), (math.inf, math.inf)

    def consider(w):
        nonlocal best_w, best_key
        nrm = np.linalg.norm(w)
        for cand in (w, w / nrm) if nrm > 0 else (w,):
            zo = margin_loss(cand, S, gamma)
            hinge = float(np.mean(np.maximum(0.0, gamma - y * (X @ cand))))
            key = (zo, hinge)
            if key < best_key:
                best_key, best_w = key, cand.copy()

    for r in range(restarts):
        if r == 0:
            w = np.zeros(X.shape[1])
        else:
            w = rng.standard_normal(X.shape[1])
            w /= np.linalg.norm(w)
        for t in range(1, iters + 1):
            margins = y * (X @ w)
            viol = margins < gamma
            if not np.any(viol):
                break
            g = -(y[viol, None] * X[viol]).sum(axis=0) / m
            w = w - (max(gamma, row_scale) / (row_scale * row_scale * math.sqrt(t))) * g
            nrm = np.linalg.norm(w)
            if nrm > 1.0:
                w = w / nrm
            if t % 10 == 0:
                consider(w)
        consider(w)
    return best_w


def adversarial_minimizer(S_train: LabeledSample, test_points: np.ndarray,
                          test_labels: np.ndarray, gamma: float,
                          cap: int = 20) -> np.ndarray:
    """Zero-training-margin-loss separator that misclassifies every test point.

    Valid only when the combined train+test point set is origin-shattered at
    margin gamma (checked exactly); raises NotShatteredError otherwise.
    """
    test_points = np.atleast_2d(np.asarray(test_points, dtype=float))
    test_labels = np.atleast_1d(np.asarray(test_labels, dtype=float))
    combined = np.vstack([S_train.points, test_points])
    cert = shatter_at_origin(SampleMatrix(combined), gamma, cap=cap)
    if not cert.shattered:
        raise NotShatteredError(
            f"combined set not shattered at gamma={gamma} "
            f"(worst value {cert.worst_value:.4g}, Gram condition {cert.gram_condition:.3g})")
    targets = np.concatenate([S_train.labels, -test_labels])
    return min_norm_interpolator(combined / gamma, targets)


@dataclass(frozen=True)
class NearestMeanRule:
    w: np.ndarray
    midpoint: np.ndarray

    def predict(self, points: np.ndarray) -> np.ndarray:
        s = (points - self.midpoint) @ self.w
        return np.where(s >= 0, 1.0, -1.0)


def generative_nearest_mean(S: LabeledSample) -> NearestMeanRule:
    """Nearest-class-center rule from empirical class means."""
    pos = S.points[S.labels > 0]
    neg = S.points[S.labels < 0]
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateSampleError("both classes must be present")
    diff = pos.mean(axis=0) - neg.mean(axis=0)
    nrm = float(np.linalg.norm(diff))
    if nrm == 0:
        raise DegenerateSampleError("class means coincide")
    return NearestMeanRule(w=diff / nrm, midpoint=(pos.mean(axis=0) + neg.mean(axis=0)) / 2.0)


def _zero_one_error(pred: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(pred != labels))


def estimate_lstar(spec: DistributionSpec, gamma: float, seed: int,
                   draws: int = 100_000) -> float | None:
    """Margin-loss proxy of the known best separator, by Monte Carlo.

    Upper-bounds the optimal margin loss: uses the labeling halfspace
    direction when the label model is a halfspace, and the mixture axis for
    the mixture-component model.  None when no best direction is known.
    """
    lm = spec.label_model
    if lm.kind in ("halfspace", "halfspace_with_flip"):
        w = lm.w / np.linalg.norm(lm.w)
    elif lm.kind == "mixture_component":
        w = np.zeros(spec.d)
        w[0] = 1.0
        if spec.rotation is not None:
            w = spec.rotation @ w
    else:
        return None
    S = sample(spec, draws, seed, stream=0x1057a7)
    return margin_loss(w, LabeledSample(S.points, S.labels), gamma)


def _run_learner(learner_kind: str, train: LabeledSample, test: LabeledSample,
                 gamma: float, seed: int) -> float:
    """Test misclassification error of one learner invocation."""
    if learner_kind == "erm_exact":
        out = margin_error_minimize(train, gamma, mode="exact")
        pred = np.where(test.points @ out.w >= 0, 1.0, -1.0)
        return _zero_one_error(pred, test.labels)
    if learner_kind == "erm_heuristic":
        out = margin_error_minimize(train, gamma, mode="heuristic", seed=seed)
        pred = np.where(test.points @ out.w >= 0, 1.0, -1.0)
        return _zero_one_error(pred, test.labels)
    if learner_kind == "adversarial":
        w = adversarial_minimizer(train, test.points, test.labels, gamma)
        pred = np.where(test.points @ w >= 0, 1.0, -1.0)
        return _zero_one_error(pred, test.labels)
    if learner_kind == "generative":
        try:
            rule = generative_nearest_mean(train)
            pred = rule.predict(test.points)
        except DegenerateSampleError:
            # single-class or coinciding-mean draws: predict the majority class
            maj = 1.0 if float(train.labels.sum()) >= 0 else -1.0
            pred = np.full(test.m, maj)
        return _zero_one_error(pred, test.labels)
    raise ValueError(f"unknown learner kind {learner_kind!r}")


def learning_curve(spec: DistributionSpec, gamma: float, m_grid, trials: int,
                   learner_kind: str, seed: int, workers: int = 1) -> LearningCurve:
    """Mean test error vs sample size, with equal train and test sizes."""

    def one(m: int, t: int) -> float:
        train_s = sample(spec, m, seed, stream=2 * t)
        test_s = sample(spec, m, seed, stream=2 * t + 1)
        return _run_learner(learner_kind,
                            LabeledSample(train_s.points, train_s.labels),
                            LabeledSample(test_s.points, test_s.labels),
                            gamma, seed=seed * 1_000_003 + t)

    entries = []
    for m in m_grid:
        if workers <= 1:
            errs = [one(m, t) for t in range(trials)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                errs = list(ex.map(lambda t: one(m, t), range(trials)))
        errs = np.array(errs)
        entries.append(CurveEntry(m=int(m), mean_test_error=float(errs.mean()),
                                  std_error=float(errs.std(ddof=1) / math.sqrt(trials))
                                  if trials > 1 else 0.0,
                                  trials=trials))
    import hashlib
    import json
    digest = hashlib.sha256(
        json.dumps(spec.to_json(), sort_keys=True).encode()).hexdigest()[:16]
    return LearningCurve(gamma=float(gamma), entries=tuple(entries),
                         learner_kind=learner_kind, distribution_digest=digest,
                         lstar=estimate_lstar(spec, gamma, seed), seed=seed)


def empirical_sample_complexity(curve: LearningCurve, epsilon: float) -> int | None:
    """Smallest grid m with mean test error within epsilon of the lstar proxy;
    None when the curve never gets there."""
    if curve.lstar is None:
        raise ValueError("curve has no lstar estimate")
    if not (0 < epsilon < 1):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    for e in curve.entries:
        if e.mean_test_error - curve.lstar <= epsilon:
            return e.m
    return None


def write_curve_csv(path, curve: LearningCurve) -> None:
    """Emit a learning curve as CSV with stable column names."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["m", "mean_test_error", "std_error", "trials",
                    "learner_kind", "gamma", "seed"])
        for e in curve.entries:
            w.writerow([e.m, repr(e.mean_test_error), repr(e.std_error), e.trials,
                        curve.learner_kind, repr(curve.gamma), curve.seed])
