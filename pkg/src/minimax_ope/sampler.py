"""Seeded generation of logged bandit data.

Every trial owns an independent PCG64 stream spawned from
``(base_seed, trial_index)``, so a dataset depends only on its
:class:`SeedSpec` and never on the order or thread in which trials run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandit import BanditInstance, Dataset


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if not (0 <= self.base_seed < 2**64):
            raise ValueError("base_seed must be an unsigned 64-bit integer")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.base_seed, spawn_key=(self.trial_index,))
        return np.random.Generator(np.random.PCG64(ss))


def _bernoulli_rewards(rng: np.random.Generator, instance: BanditInstance,
                       actions: np.ndarray) -> np.ndarray:
    p = instance.mean_rewards[actions] / instance.r_max
    return np.where(rng.random(actions.shape[0]) < p, instance.r_max, 0.0)


def _multinomial_arrays(instance: BanditInstance, n: int, seed: SeedSpec):
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed.generator()
    # inverse-cdf draw; zero-mass actions have empty cdf intervals
    cdf = np.cumsum(instance.behavior.weights)
    actions = np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right")
    return actions, _bernoulli_rewards(rng, instance, actions)


def _poisson_arrays(instance: BanditInstance, n: float, seed: SeedSpec):
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed.generator()
    counts = rng.poisson(n * instance.behavior.weights)
    actions = np.repeat(np.arange(instance.k), counts)
    return actions, _bernoulli_rewards(rng, instance, actions)


def draw_multinomial_dataset(instance: BanditInstance, n: int, seed: SeedSpec) -> Dataset:
    """Draw ``n`` i.i.d. actions from the behavior policy with Bernoulli rewards.

    The reward for action ``a`` is ``r_max`` with probability
    ``r(a) / r_max`` and 0 otherwise.
    """
    actions, rewards = _multinomial_arrays(instance, n, seed)
    return Dataset(actions, rewards, instance.k, n, "multinomial", instance.r_max)


def draw_poisson_dataset(instance: BanditInstance, n: float, seed: SeedSpec) -> Dataset:
    """Poissonized draw: ``n(a) ~ Poisson(n * behavior(a))`` independently."""
    actions, rewards = _poisson_arrays(instance, n, seed)
    return Dataset(actions, rewards, instance.k, n, "poisson", instance.r_max)


def draw_dataset(instance: BanditInstance, n: float, seed: SeedSpec,
                 mode: str = "multinomial") -> Dataset:
    if mode == "multinomial":
        return draw_multinomial_dataset(instance, int(n), seed)
    if mode == "poisson":
        return draw_poisson_dataset(instance, n, seed)
    raise ValueError(f"unknown sampling mode {mode!r}")


def draw_statistics(instance: BanditInstance, n: float, seed: SeedSpec,
                    mode: str = "multinomial") -> tuple[np.ndarray, np.ndarray]:
    """Per-action counts and reward sums of the dataset :func:`draw_dataset`
    would return for the same arguments, without building it."""
    if mode == "multinomial":
        actions, rewards = _multinomial_arrays(instance, int(n), seed)
    elif mode == "poisson":
        actions, rewards = _poisson_arrays(instance, n, seed)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    k = instance.k
    return (np.bincount(actions, minlength=k),
            np.bincount(actions, weights=rewards, minlength=k))


def action_counts(dataset: Dataset) -> np.ndarray:
    """Number of observations of each action."""
    return np.array(dataset.counts)
