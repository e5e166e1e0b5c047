import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minimax_ope import (
    BanditInstance,
    SeedSpec,
    draw_dataset,
    draw_multinomial_dataset,
    draw_poisson_dataset,
    uniform_policy,
    validate_policy,
)
from minimax_ope.sampler import action_counts, draw_statistics

from conftest import random_instance


def point_mass_instance(k, a, reward):
    w = np.zeros(k)
    w[a] = 1
    r = np.zeros(k)
    r[a] = reward
    return BanditInstance(uniform_policy(k), validate_policy(w), r)


def test_point_mass_full_reward():
    d = draw_multinomial_dataset(point_mass_instance(3, 1, 1.0), 50, SeedSpec(1))
    assert d.pairs == [(1, 1.0)] * 50


def test_point_mass_zero_reward():
    d = draw_multinomial_dataset(point_mass_instance(3, 1, 0.0), 50, SeedSpec(1))
    assert d.pairs == [(1, 0.0)] * 50


def test_uniform_frequency():
    inst = BanditInstance(uniform_policy(2), uniform_policy(2), [0.5, 0.5])
    n = 100_000
    d = draw_multinomial_dataset(inst, n, SeedSpec(7))
    freq = d.counts[0] / n
    assert abs(freq - 0.5) <= 4 * math.sqrt(0.25 / n)


def test_rewards_take_two_values():
    inst = BanditInstance(uniform_policy(2), uniform_policy(2), [0.3, 1.2], r_max=2.0)
    d = draw_multinomial_dataset(inst, 2000, SeedSpec(3))
    assert set(np.unique(d.rewards)) <= {0.0, 2.0}
    means = d.empirical_rewards()
    assert abs(means[0] - 0.3) < 0.15 and abs(means[1] - 1.2) < 0.15


def test_poisson_zero_mass_never_observed():
    inst = BanditInstance(uniform_policy(3), validate_policy([0.5, 0.0, 0.5]), [0.5] * 3)
    for t in range(50):
        assert draw_poisson_dataset(inst, 30, SeedSpec(2, t)).counts[1] == 0


def test_poisson_single_arm_mean():
    inst = BanditInstance(uniform_policy(1), uniform_policy(1), [0.5])
    trials = 10_000
    counts = [draw_poisson_dataset(inst, 50, SeedSpec(11, t)).counts[0] for t in range(trials)]
    assert abs(np.mean(counts) - 50) <= 4 * math.sqrt(50 / trials)


def test_poisson_total_is_poisson():
    inst = BanditInstance(uniform_policy(4), validate_policy([0.1, 0.2, 0.3, 0.4]), [0.5] * 4)
    totals = np.array([len(draw_poisson_dataset(inst, 20, SeedSpec(5, t))) for t in range(4000)])
    # mean and variance of Poisson(20); variance estimate has sd ~ sqrt(2 * 20^2 / 4000)
    assert abs(totals.mean() - 20) < 4 * math.sqrt(20 / 4000)
    assert abs(totals.var(ddof=1) - 20) < 4 * math.sqrt(2 * 400 / 4000)


def test_action_counts():
    from minimax_ope import Dataset

    d = Dataset.from_pairs([(0, 1.0), (0, 0.0), (1, 1.0)], k=2)
    assert np.array_equal(action_counts(d), [2, 1])
    empty = Dataset([], [], k=3, n=2.0, mode="poisson")
    assert np.array_equal(action_counts(empty), [0, 0, 0])


def test_seed_determines_dataset(rng):
    inst = random_instance(rng, 6)
    a = draw_dataset(inst, 40, SeedSpec(99, 3))
    b = draw_dataset(inst, 40, SeedSpec(99, 3))
    c = draw_dataset(inst, 40, SeedSpec(99, 4))
    assert a.pairs == b.pairs
    assert a.pairs != c.pairs


def test_trial_streams_independent_of_thread_order(rng):
    inst = random_instance(rng, 5)
    serial = [draw_dataset(inst, 30, SeedSpec(1, t), "poisson").pairs for t in range(40)]
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(lambda t: draw_dataset(inst, 30, SeedSpec(1, t), "poisson").pairs,
                                 reversed(range(40))))
    assert serial == threaded[::-1]


@pytest.mark.parametrize("mode", ["multinomial", "poisson"])
def test_statistics_match_dataset(rng, mode):
    inst = random_instance(rng, 7, zero_prob=0.3)
    for t in range(20):
        d = draw_dataset(inst, 25, SeedSpec(8, t), mode)
        counts, sums = draw_statistics(inst, 25, SeedSpec(8, t), mode)
        assert np.array_equal(counts, d.counts)
        assert np.array_equal(sums, d.reward_sums)


def test_seed_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(2**64)
    with pytest.raises(ValueError):
        SeedSpec(0, -1)
    with pytest.raises(ValueError):
        draw_dataset(BanditInstance(uniform_policy(1), uniform_policy(1), [0.5]), 5,
                     SeedSpec(0), "bootstrap")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2**64 - 1), st.integers(1, 8))
def test_multinomial_partition(n, seed, k):
    inst = BanditInstance(uniform_policy(k), uniform_policy(k), np.full(k, 0.5))
    d = draw_multinomial_dataset(inst, n, SeedSpec(seed))
    assert d.counts.sum() == n
    assert np.all((d.rewards == 0) | (d.rewards == 1))
