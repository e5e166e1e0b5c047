"""Value estimators for off-policy evaluation in multi-armed bandits.

Every estimator here depends on the data only through the per-action counts
``n(a)`` and reward sums; the ``*_from_stats`` forms take those directly and
are what the Monte Carlo loop calls.
"""

from __future__ import annotations

import math

import numpy as np

from .bandit import Dataset, Policy, as_mask, likelihood_ratio
from .errors import DimensionMismatch, InfiniteRatioObserved, InfiniteRatioOutsideS


def _check_k(dataset: Dataset, *policies: Policy):
    for p in policies:
        if p.k != dataset.k:
            raise DimensionMismatch(f"policy has k={p.k}, dataset has k={dataset.k}")


def empirical_means(counts: np.ndarray, sums: np.ndarray) -> np.ndarray:
    """Per-action mean reward, 0 where the action was never observed."""
    return np.divide(sums, counts, out=np.zeros(counts.shape[0]), where=counts > 0)


def plug_in_from_stats(pt: np.ndarray, counts: np.ndarray, sums: np.ndarray) -> float:
    return math.fsum(pt * empirical_means(counts, sums))


def weighted_sum_from_stats(rho: np.ndarray, pb: np.ndarray, counts: np.ndarray,
                            sums: np.ndarray, keep: np.ndarray) -> float:
    """``sum_i rho(A_i) R_i 1{A_i in keep}``, computed per action."""
    seen = keep & (counts > 0)
    if np.any(seen & (pb == 0)):
        a = int(np.flatnonzero(seen & (pb == 0))[0])
        raise InfiniteRatioObserved(f"observed action {a} has zero behavior probability")
    return math.fsum(rho[seen] * sums[seen])


def switch_parts_from_stats(pt, pb, rho, mask, counts, sums, n) -> tuple[float, float]:
    """Plug-in contribution on ``mask`` and IS contribution off it."""
    is_part = weighted_sum_from_stats(rho, pb, counts, sums, ~mask) / n
    plug = math.fsum(pt[mask] * empirical_means(counts[mask], sums[mask]))
    return plug, is_part


def plug_in(dataset: Dataset, target: Policy) -> float:
    """Plug empirical mean rewards into the value functional.

    Unobserved actions contribute 0.
    """
    _check_k(dataset, target)
    return plug_in_from_stats(target.weights, dataset.counts, dataset.reward_sums)


def importance_sampling(dataset: Dataset, target: Policy, behavior: Policy) -> float:
    """``(1/n) sum_i rho(A_i) R_i``.

    Raises :class:`InfiniteRatioObserved` if an observed action has zero
    behavior probability.
    """
    _check_k(dataset, target, behavior)
    rho = likelihood_ratio(target, behavior)
    keep = np.ones(dataset.k, dtype=bool)
    return weighted_sum_from_stats(rho, behavior.weights, dataset.counts,
                                   dataset.reward_sums, keep) / dataset.n


def switch_mask(target: Policy, behavior: Policy, s) -> tuple[np.ndarray, np.ndarray]:
    mask = as_mask(s, target.k)
    rho = likelihood_ratio(target, behavior)
    bad = np.isinf(rho) & ~mask
    if bad.any():
        a = int(np.flatnonzero(bad)[0])
        raise InfiniteRatioOutsideS(f"action {a} has infinite likelihood ratio but is not in S")
    return mask, rho


def _switch_parts(dataset: Dataset, target: Policy, behavior: Policy, s):
    _check_k(dataset, target, behavior)
    mask, rho = switch_mask(target, behavior, s)
    return switch_parts_from_stats(target.weights, behavior.weights, rho, mask,
                                   dataset.counts, dataset.reward_sums, dataset.n)


def switch(dataset: Dataset, target: Policy, behavior: Policy, s) -> float:
    """Plug-in on ``s`` and importance sampling on its complement."""
    plug, is_part = _switch_parts(dataset, target, behavior, s)
    return plug + is_part


def truncated_is(dataset: Dataset, target: Policy, behavior: Policy, s) -> float:
    """Importance sampling with the likelihood ratio zeroed on ``s``."""
    _, is_part = _switch_parts(dataset, target, behavior, s)
    return is_part
