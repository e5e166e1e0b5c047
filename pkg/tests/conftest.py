import numpy as np
import pytest

from minimax_ope import BanditInstance, validate_policy


def random_policy(rng, k, zero_prob=0.0):
    """Dirichlet draw with entries zeroed at rate ``zero_prob`` (never all zero)."""
    w = rng.dirichlet(np.ones(k) * rng.uniform(0.3, 2.0))
    if zero_prob:
        drop = rng.random(k) < zero_prob
        drop[rng.integers(k)] = False
        w[drop] = 0.0
    return validate_policy(w / w.sum())


def random_instance(rng, k, zero_prob=0.0, r_max=1.0):
    pt = random_policy(rng, k)
    pb = random_policy(rng, k, zero_prob)
    r = rng.uniform(0, r_max, k)
    return BanditInstance(pt, pb, r, r_max)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
