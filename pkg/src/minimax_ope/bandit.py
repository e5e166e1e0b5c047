"""Core bandit types: policies, problem instances and logged datasets.

Actions are indexed ``0 .. k-1`` throughout the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInstance,
    NegativeWeight,
    NotNormalized,
)

#: Likelihood ratio of an action the behavior policy never plays but the
#: target policy does.  Produced deliberately, never by overflow.
INFINITE = math.inf

NORMALIZATION_TOL = 1e-12

SamplingMode = Literal["multinomial", "poisson"]


def _frozen(x: Iterable[float], dtype=float) -> np.ndarray:
    arr = np.array(x, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Policy:
    """A probability distribution over ``k`` actions."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    def mass(self, subset) -> float:
        """Total probability of ``subset`` (indices or boolean mask)."""
        return float(np.sum(self.weights[as_mask(subset, self.k)]))

    def __eq__(self, other):
        return isinstance(other, Policy) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"Policy(k={self.k}, weights={np.array2string(self.weights, precision=4, threshold=8)})"


def validate_policy(weights: Sequence[float]) -> Policy:
    """Build a :class:`Policy`, rejecting invalid weight vectors.

    Weights are never renormalized: a vector whose sum is off by more than
    ``1e-12`` raises :class:`NotNormalized`.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DimensionMismatch("policy weights must be a non-empty 1-d vector")
    if not np.all(np.isfinite(w)):
        raise NotNormalized("policy weights must be finite")
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight at action {int(np.argmax(w < 0))}")
    total = math.fsum(w)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"weights sum to {total!r}, not 1")
    return Policy(w)


def uniform_policy(k: int, support: int | None = None) -> Policy:
    """Uniform policy over the first ``support`` actions (all by default)."""
    s = k if support is None else support
    w = np.zeros(k)
    w[:s] = 1.0 / s
    return validate_policy(w)


def likelihood_ratio(target: Policy, behavior: Policy) -> np.ndarray:
    """Return ``rho(a) = target(a) / behavior(a)``.

    Uses ``0/0 = 0``; a positive target weight on an action with zero
    behavior probability maps to :data:`INFINITE`.
    """
    if target.k != behavior.k:
        raise DimensionMismatch(f"target has k={target.k}, behavior has k={behavior.k}")
    pt, pb = target.weights, behavior.weights
    rho = np.zeros(pt.shape)
    seen = pb > 0
    rho[seen] = pt[seen] / pb[seen]
    rho[(~seen) & (pt > 0)] = INFINITE
    return rho


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """Ground truth for simulation: both policies and the mean rewards."""

    target: Policy
    behavior: Policy
    mean_rewards: np.ndarray
    r_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mean_rewards", _frozen(self.mean_rewards))
        if not (self.target.k == self.behavior.k == self.mean_rewards.shape[0]):
            raise DimensionMismatch(
                f"k mismatch: target {self.target.k}, behavior {self.behavior.k}, "
                f"rewards {self.mean_rewards.shape[0]}"
            )
        if not (self.r_max > 0 and math.isfinite(self.r_max)):
            raise InvalidInstance(f"r_max must be positive and finite, got {self.r_max}")
        r = self.mean_rewards
        if np.any(r < 0) or np.any(r > self.r_max):
            raise InvalidInstance("mean rewards must lie in [0, r_max]")

    @property
    def k(self) -> int:
        return self.target.k

    @property
    def rho(self) -> np.ndarray:
        return likelihood_ratio(self.target, self.behavior)

    @property
    def reward_variance(self) -> np.ndarray:
        """Per-action variance of the two-point reward on ``{0, r_max}``."""
        r = self.mean_rewards
        return r * (self.r_max - r)


def value_function(instance: BanditInstance) -> float:
    """True value ``sum_a target(a) * r(a)`` of the target policy."""
    return math.fsum(instance.target.weights * instance.mean_rewards)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Logged ``(action, reward)`` pairs.

    ``n`` is the sample size in multinomial mode and the Poisson rate in
    poisson mode, where ``len(actions)`` is the realized total count.
    """

    actions: np.ndarray
    rewards: np.ndarray
    k: int
    n: float
    mode: SamplingMode = "multinomial"
    r_max: float = 1.0
    _counts: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "actions", _frozen(self.actions, dtype=np.int64))
        object.__setattr__(self, "rewards", _frozen(self.rewards))
        a, r = self.actions, self.rewards
        if a.shape != r.shape or a.ndim != 1:
            raise DimensionMismatch("actions and rewards must be 1-d and of equal length")
        if a.size and (a.min() < 0 or a.max() >= self.k):
            raise DimensionMismatch(f"actions must lie in [0, {self.k})")
        if r.size and (r.min() < 0 or r.max() > self.r_max):
            raise InvalidInstance("rewards must lie in [0, r_max]")
        if self.mode not in ("multinomial", "poisson"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "multinomial" and a.size != self.n:
            raise DimensionMismatch(f"multinomial dataset has {a.size} pairs but n={self.n}")

    @classmethod
    def from_pairs(cls, pairs, k: int, n: float | None = None, mode: SamplingMode = "multinomial",
                   r_max: float = 1.0) -> "Dataset":
        pairs = list(pairs)
        actions = [p[0] for p in pairs]
        rewards = [p[1] for p in pairs]
        return cls(np.array(actions, dtype=np.int64), np.array(rewards, dtype=float), k,
                   len(pairs) if n is None else n, mode, r_max)

    @property
    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.actions.tolist(), self.rewards.tolist()))

    def __len__(self) -> int:
        return self.actions.shape[0]

    @property
    def counts(self) -> np.ndarray:
        if self._counts is None:
            c = np.bincount(self.actions, minlength=self.k)
            c.setflags(write=False)
            object.__setattr__(self, "_counts", c)
        return self._counts

    @property
    def reward_sums(self) -> np.ndarray:
        return np.bincount(self.actions, weights=self.rewards, minlength=self.k)

    def empirical_rewards(self) -> np.ndarray:
        """Per-action empirical mean reward, 0 for unobserved actions."""
        c = self.counts
        out = np.zeros(self.k)
        seen = c > 0
        out[seen] = self.reward_sums[seen] / c[seen]
        return out


def as_mask(subset, k: int) -> np.ndarray:
    """Normalize a subset given as indices or a boolean mask to a mask."""
    if subset is None:
        return np.zeros(k, dtype=bool)
    arr = np.asarray(subset)
    if arr.dtype == bool:
        if arr.shape != (k,):
            raise DimensionMismatch(f"subset mask must have length {k}")
        return arr
    mask = np.zeros(k, dtype=bool)
    idx = arr.astype(np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= k):
        raise DimensionMismatch(f"subset indices must lie in [0, {k})")
    mask[idx] = True
    return mask


