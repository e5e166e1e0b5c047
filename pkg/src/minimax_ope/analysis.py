"""Exact and Monte Carlo mean-squared errors, competitive ratios and slope fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import stats

from .bandit import BanditInstance, Dataset, Policy, likelihood_ratio, value_function
from .chebyshev import ChebyshevWeights, chebyshev_from_stats, weights_for
from .errors import DimensionMismatch, NonPositiveInput, ZeroDenominator
from .estimators import (
    switch_mask,
    plug_in_from_stats,
    switch_parts_from_stats,
    weighted_sum_from_stats,
)
from .sampler import SeedSpec, draw_dataset, draw_statistics
from .subset import minimax_risk_surrogate, solve_optimal_subset

Estimator = Callable[[Dataset], float]

ESTIMATOR_NAMES = ("plugin", "is", "switch", "truncated-is", "chebyshev")


@dataclass(frozen=True)
class MseReport:
    mean_squared_error: float
    std_error: float
    trials: int
    estimator_name: str
    n: float
    k: int
    seed: int

    def __post_init__(self):
        if self.trials < 1 or self.std_error < 0:
            raise ValueError("need trials >= 1 and std_error >= 0")


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    intercept: float
    points: int


# ---------------------------------------------------------------------------
# exact expectations under multinomial sampling


def binomial_inverse_moment(n: int, p: float) -> float:
    """``E[1{X > 0} / X]`` for ``X ~ Binomial(n, p)``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p == 0:
        return 0.0
    j = np.arange(1, n + 1)
    logpmf = stats.binom.logpmf(j, n, p)
    return math.fsum(np.exp(logpmf - np.log(j)))


def _pow_one_minus(p: np.ndarray, n: int) -> np.ndarray:
    # (1 - p)^n through log1p; exact zero once p reaches 1
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p, dtype=float)
    live = p < 1
    out[live] = np.exp(n * np.log1p(-p[live]))
    return out


def plugin_mse_exact(instance: BanditInstance, n: int) -> float:
    """Exact MSE of the plug-in estimator with two-point rewards.

    Squared bias, plus the within-action variance
    ``sum_a pi_t(a)^2 sigma^2(a) E[1{n(a)>0}/n(a)]``, plus the variance of
    ``sum_a pi_t(a) r(a) 1{n(a) > 0}`` from pairwise zero-count probabilities.
    """
    pt, pb, r = instance.target.weights, instance.behavior.weights, instance.mean_rewards
    miss = _pow_one_minus(pb, n)  # P(n(a) = 0)
    bias = math.fsum(pt * r * miss)
    sigma2 = instance.reward_variance
    within = math.fsum(
        pt[a] ** 2 * sigma2[a] * binomial_inverse_moment(n, pb[a])
        for a in range(instance.k) if pt[a] * sigma2[a] > 0
    )
    w = pt * r
    live = np.flatnonzero(w > 0)
    if live.size:
        p = pb[live]
        both_missing = _pow_one_minus(p[:, None] + p[None, :], n)
        np.fill_diagonal(both_missing, miss[live])
        cov = both_missing - np.outer(miss[live], miss[live])
        indicator_var = float(w[live] @ cov @ w[live])
    else:
        indicator_var = 0.0
    return bias**2 + within + max(indicator_var, 0.0)


def poisson_weighted_mse_exact(instance: BanditInstance, weights: ChebyshevWeights,
                               n: float, tail: float = 1e-16) -> float:
    """Exact Poisson-model MSE of ``sum_a pi_t(a) rhat(a) g(n(a))``.

    Covers the Chebyshev estimator and, with plug-in weights, the plug-in
    estimator.  Counts are independent across actions under Poisson
    sampling, so the MSE is the squared total bias plus per-action variances.
    """
    pt, pb, r = instance.target.weights, instance.behavior.weights, instance.mean_rewards
    sigma2 = instance.reward_variance
    bias = []
    var = []
    for a in range(instance.k):
        if pt[a] == 0:
            continue
        lam = n * pb[a]
        top = int(stats.poisson.isf(tail, lam)) + 2 if lam > 0 else 0
        j = np.arange(0, top + 1)
        pmf = stats.poisson.pmf(j, lam)
        g = weights.g(j)
        jj = np.maximum(j, 1)
        mean_x = r[a] * g * (j > 0)
        second = g**2 * (sigma2[a] / jj + r[a] ** 2) * (j > 0)
        m1 = math.fsum(pmf * mean_x)
        m2 = math.fsum(pmf * second)
        bias.append(pt[a] * (m1 - r[a]))
        var.append(pt[a] ** 2 * max(m2 - m1**2, 0.0))
    return math.fsum(bias) ** 2 + math.fsum(var)


# ---------------------------------------------------------------------------
# Monte Carlo


class BoundEstimator:
    """An estimator with its policies (and subset or weights) fixed.

    Calling it on a :class:`Dataset` checks dimensions and evaluates; the
    Monte Carlo loop calls :meth:`from_stats` on counts and reward sums
    directly, which gives bit-identical results.
    """

    def __init__(self, name: str, k: int, fn: Callable[[np.ndarray, np.ndarray, float], float]):
        self.name = name
        self.k = k
        self.from_stats = fn

    def __call__(self, dataset: Dataset) -> float:
        if dataset.k != self.k:
            raise DimensionMismatch(f"estimator has k={self.k}, dataset has k={dataset.k}")
        return self.from_stats(dataset.counts, dataset.reward_sums, dataset.n)

    def __repr__(self):
        return f"BoundEstimator({self.name!r}, k={self.k})"


def make_estimator(name: str, instance: BanditInstance, n: float, *,
                   subset=None, nu: float | None = None,
                   chebyshev_weights: ChebyshevWeights | None = None,
                   c0: float | None = None, c1: float | None = None) -> BoundEstimator:
    """Bind an estimator by name to the policies of ``instance``.

    ``switch`` and ``truncated-is`` default to the optimal subset for ``n``;
    ``chebyshev`` defaults to ``nu = min_a pi_b(a)`` and the default constants.
    """
    target, behavior = instance.target, instance.behavior
    pt, pb, k = target.weights, behavior.weights, instance.k
    rho = likelihood_ratio(target, behavior)
    if name == "plugin":
        fn = lambda c, s, n_: plug_in_from_stats(pt, c, s)
    elif name == "is":
        keep = np.ones(k, dtype=bool)
        fn = lambda c, s, n_: weighted_sum_from_stats(rho, pb, c, s, keep) / n_
    elif name in ("switch", "truncated-is"):
        s_ = solve_optimal_subset(target, behavior, n).mask if subset is None else subset
        mask, _ = switch_mask(target, behavior, s_)
        if name == "switch":
            fn = lambda c, s, n_: sum(switch_parts_from_stats(pt, pb, rho, mask, c, s, n_))
        else:
            fn = lambda c, s, n_: switch_parts_from_stats(pt, pb, rho, mask, c, s, n_)[1]
    elif name == "chebyshev":
        w = chebyshev_weights
        if w is None:
            nu_ = float(np.min(pb)) if nu is None else nu
            kwargs = {key: v for key, v in (("c0", c0), ("c1", c1)) if v is not None}
            w = weights_for(nu_, k, n, **kwargs)
        fn = lambda c, s, n_: chebyshev_from_stats(pt, w, c, s)
    elif name == "zero":
        fn = lambda c, s, n_: 0.0
    else:
        raise ValueError(f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}")
    return BoundEstimator(name, k, fn)


def _trial_errors(estimators: Sequence[Estimator], instance: BanditInstance, n: float,
                  mode: str, base_seed: int, truth: float, lo: int, hi: int,
                  sampler=None) -> np.ndarray:
    out = np.empty((hi - lo, len(estimators)))
    fast = sampler is None and all(isinstance(e, BoundEstimator) for e in estimators)
    for row, t in enumerate(range(lo, hi)):
        seed = SeedSpec(base_seed, t)
        if fast:
            counts, sums = draw_statistics(instance, n, seed, mode)
            for col, est in enumerate(estimators):
                out[row, col] = (est.from_stats(counts, sums, n) - truth) ** 2
            continue
        d = draw_dataset(instance, n, seed, mode) if sampler is None else sampler(seed)
        for col, est in enumerate(estimators):
            out[row, col] = (est(d) - truth) ** 2
    return out


def squared_errors(estimators: Mapping[str, Estimator], instance: BanditInstance, n: float,
                   trials: int, base_seed: int, mode: str = "multinomial", workers: int = 1,
                   sampler: Callable[[SeedSpec], Dataset] | None = None) -> dict[str, np.ndarray]:
    """Per-trial squared errors, one row per trial in trial-index order.

    All estimators see the same dataset in a given trial.  ``sampler``
    replaces the default simulator (e.g. to resample a ratings pool).
    """
    names = list(estimators)
    ests = [estimators[k] for k in names]
    truth = value_function(instance)
    if workers <= 1:
        errs = _trial_errors(ests, instance, n, mode, base_seed, truth, 0, trials, sampler)
    else:
        bounds = np.linspace(0, trials, workers * 4 + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            parts = pool.map(
                lambda b: _trial_errors(ests, instance, n, mode, base_seed, truth,
                                        b[0], b[1], sampler),
                zip(bounds[:-1], bounds[1:]))
            errs = np.concatenate(list(parts))
    return {name: errs[:, i] for i, name in enumerate(names)}


def summarize(errors: np.ndarray, name: str, instance: BanditInstance, n: float,
              base_seed: int) -> MseReport:
    trials = errors.shape[0]
    mean = math.fsum(errors) / trials
    if trials > 1:
        var = math.fsum((errors - mean) ** 2) / (trials - 1)
    else:
        var = 0.0
    return MseReport(mean, math.sqrt(var / trials), trials, name, n, instance.k, base_seed)


def monte_carlo_compare(estimators: Mapping[str, Estimator], instance: BanditInstance,
                        n: float, trials: int, base_seed: int, mode: str = "multinomial",
                        workers: int = 1, sampler=None) -> dict[str, MseReport]:
    """Monte Carlo MSE of several estimators on common simulated datasets."""
    if trials < 2:
        raise ValueError("trials must be at least 2")
    errs = squared_errors(estimators, instance, n, trials, base_seed, mode, workers, sampler)
    return {name: summarize(e, name, instance, n, base_seed) for name, e in errs.items()}


def monte_carlo_mse(estimator: Estimator | str, instance: BanditInstance, n: float,
                    trials: int, base_seed: int, mode: str = "multinomial",
                    workers: int = 1, name: str | None = None) -> MseReport:
    """Mean of ``(Vhat - V)^2`` over independent seeded trials.

    ``estimator`` is a callable on datasets or one of :data:`ESTIMATOR_NAMES`.
    The result does not depend on ``workers``.
    """
    if isinstance(estimator, str):
        name = name or estimator
        estimator = make_estimator(estimator, instance, n)
    name = name or getattr(estimator, "__name__", "estimator")
    return monte_carlo_compare({name: estimator}, instance, n, trials, base_seed, mode,
                               workers)[name]


# ---------------------------------------------------------------------------
# competitive ratio


@dataclass(frozen=True)
class CompetitiveRatio:
    ratio: float
    numerator: float
    denominator: float
    denominator_std_error: float
    denominator_trials: int
    seed: int
    risk_surrogate: float = field(default=math.nan)

    def __float__(self):
        return self.ratio


def switch_surrogate_mse(instance: BanditInstance, n: int, trials: int,
                         base_seed: int, workers: int = 1) -> MseReport:
    """Monte Carlo MSE of the Switch estimator at the optimal subset."""
    return monte_carlo_mse("switch", instance, n, trials, base_seed, workers=workers)


def competitive_ratio(numerator_mse: float, target: Policy, behavior: Policy, n: int,
                      r_max: float = 1.0, *, mean_rewards=None, trials: int = 10_000,
                      base_seed: int = 0, denominator: MseReport | None = None,
                      workers: int = 1) -> CompetitiveRatio:
    """Ratio of an MSE to the Switch-at-optimal-subset MSE on the same instance.

    The minimax risk has no closed form; the Switch estimator's Monte Carlo
    MSE stands in for it (correct up to a constant).  Rewards default to
    two-point with mean ``r_max / 2``.  Pass ``denominator`` to reuse a
    previously computed surrogate.
    """
    if numerator_mse < 0:
        raise ValueError("numerator_mse must be non-negative")
    if mean_rewards is None:
        mean_rewards = np.full(target.k, r_max / 2)
    instance = BanditInstance(target, behavior, mean_rewards, r_max)
    if denominator is None:
        denominator = switch_surrogate_mse(instance, n, trials, base_seed, workers)
    if denominator.mean_squared_error <= 0:
        raise ZeroDenominator("Switch surrogate MSE is zero")
    surrogate = minimax_risk_surrogate(target, behavior, n, r_max).value
    return CompetitiveRatio(numerator_mse / denominator.mean_squared_error, numerator_mse,
                            denominator.mean_squared_error, denominator.std_error,
                            denominator.trials, denominator.seed, surrogate)


# ---------------------------------------------------------------------------
# scaling exponents


def loglog_slope(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """Least-squares fit of ``log(mse)`` on ``log(n)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (n, mse) points")
    if np.any(pts <= 0):
        raise NonPositiveInput("n and mse must be positive")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if pts.shape[0] == 2:
        slope = (y[1] - y[0]) / (x[1] - x[0])
        return SlopeFit(float(slope), 0.0, float(y[0] - slope * x[0]), 2)
    fit = stats.linregress(x, y)
    return SlopeFit(float(fit.slope), float(fit.stderr), float(fit.intercept), pts.shape[0])
