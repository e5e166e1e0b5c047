import itertools
import math

import numpy as np
import pytest
from scipy import stats

from minimax_ope import (
    BanditInstance,
    NonPositiveInput,
    binomial_inverse_moment,
    competitive_ratio,
    loglog_slope,
    make_estimator,
    monte_carlo_compare,
    monte_carlo_mse,
    plugin_mse_exact,
    poisson_weighted_mse_exact,
    uniform_policy,
    validate_policy,
    value_function,
    weights_for,
)
from minimax_ope.analysis import MseReport, squared_errors
from minimax_ope.chebyshev import plug_in_weights
from minimax_ope.errors import ZeroDenominator

from conftest import random_instance


def compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def enumerated_plugin_mse(inst, n):
    """``E[(Vhat - V)^2]`` summed over every count vector and success pattern."""
    pt, pb, r, r_max = (inst.target.weights, inst.behavior.weights, inst.mean_rewards,
                        inst.r_max)
    truth = value_function(inst)
    total = 0.0
    for counts in compositions(n, inst.k):
        p_counts = stats.multinomial.pmf(counts, n, pb)
        if p_counts == 0:
            continue
        ranges = [range(c + 1) for c in counts]
        for succ in itertools.product(*ranges):
            p = p_counts
            est = 0.0
            for a, (c, s) in enumerate(zip(counts, succ)):
                p *= stats.binom.pmf(s, c, r[a] / r_max)
                if c:
                    est += pt[a] * r_max * s / c
            total += p * (est - truth) ** 2
    return total


class TestPluginMseExact:
    def test_single_arm(self):
        inst = BanditInstance(uniform_policy(1), uniform_policy(1), [0.5])
        assert plugin_mse_exact(inst, 1) == pytest.approx(0.25)

    def test_full_behavior_mass_no_bias(self):
        inst = BanditInstance(validate_policy([1, 0]), validate_policy([1, 0]), [0.3, 0.8])
        for n in (1, 4, 30):
            assert plugin_mse_exact(inst, n) == pytest.approx(0.3 * 0.7 / n)

    def test_k2_n5_enumeration(self, rng):
        inst = random_instance(rng, 2)
        assert plugin_mse_exact(inst, 5) == pytest.approx(enumerated_plugin_mse(inst, 5),
                                                          abs=1e-12)

    def test_monte_carlo_agrees(self, rng):
        inst = random_instance(rng, 2)
        rep = monte_carlo_mse("plugin", inst, 6, 20_000, 5)
        assert abs(rep.mean_squared_error - plugin_mse_exact(inst, 6)) <= 4 * rep.std_error


class TestBinomialInverseMoment:
    @pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 1.0])
    def test_n1(self, p):
        assert binomial_inverse_moment(1, p) == pytest.approx(p)

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_n2(self, p):
        assert binomial_inverse_moment(2, p) == pytest.approx(2 * p * (1 - p) + p * p / 2)

    def test_bound(self):
        for n in (5, 50, 500):
            for p in np.linspace(1 / n, 1, 17):
                assert binomial_inverse_moment(n, p) <= 5 / (n * p)

    def test_bad_p(self):
        with pytest.raises(ValueError):
            binomial_inverse_moment(3, 1.5)


class TestMonteCarlo:
    def test_zero_rewards(self, rng):
        inst = BanditInstance(uniform_policy(3), uniform_policy(3), [0, 0, 0])
        for name in ("plugin", "is", "switch"):
            assert monte_carlo_mse(name, inst, 10, 200, 1).mean_squared_error == 0.0

    def test_on_policy_is_variance(self):
        p = validate_policy([0.2, 0.3, 0.5])
        inst = BanditInstance(p, p, [0.1, 0.5, 0.9])
        v = value_function(inst)
        sigma2 = v - v * v  # Bernoulli reward on {0, 1} with mean v
        n = 20
        rep = monte_carlo_mse("is", inst, n, 20_000, 3)
        assert abs(rep.mean_squared_error - sigma2 / n) <= 4 * rep.std_error

    def test_workers_do_not_change_result(self, rng):
        inst = random_instance(rng, 5)
        a = monte_carlo_mse("switch", inst, 15, 500, 9, workers=1)
        b = monte_carlo_mse("switch", inst, 15, 500, 9, workers=3)
        assert a == b

    def test_common_random_numbers(self, rng):
        inst = random_instance(rng, 4)
        ests = {n: make_estimator(n, inst, 12) for n in ("plugin", "is")}
        both = monte_carlo_compare(ests, inst, 12, 300, 2)
        alone = monte_carlo_mse("is", inst, 12, 300, 2)
        assert both["is"].mean_squared_error == alone.mean_squared_error

    def test_callable_estimator_and_sampler_path(self, rng):
        inst = random_instance(rng, 3)
        est = make_estimator("plugin", inst, 8)
        a = monte_carlo_mse(lambda d: est(d), inst, 8, 200, 4, name="plugin")
        b = monte_carlo_mse(est, inst, 8, 200, 4, name="plugin")
        assert a == b

    def test_report_validation(self):
        with pytest.raises(ValueError):
            MseReport(0.1, -1.0, 10, "x", 5, 2, 0)


class TestPoissonExact:
    def test_plug_in_weights_match_monte_carlo(self, rng):
        inst = random_instance(rng, 4)
        exact = poisson_weighted_mse_exact(inst, plug_in_weights(10), 10)
        rep = monte_carlo_mse("plugin", inst, 10, 20_000, 7, mode="poisson")
        assert abs(rep.mean_squared_error - exact) <= 4 * rep.std_error

    def test_chebyshev_matches_monte_carlo(self):
        k = 40
        pb = np.full(k, k**-1.5)
        pb[0] = 1 - (k - 1) * k**-1.5
        inst = BanditInstance(uniform_policy(k), validate_policy(pb), np.full(k, 0.5))
        n = round(k**1.5)
        w = weights_for(k**-1.5, k, n, c0=1.0)
        exact = poisson_weighted_mse_exact(inst, w, n)
        est = make_estimator("chebyshev", inst, n, chebyshev_weights=w)
        rep = monte_carlo_mse(est, inst, n, 20_000, 8, mode="poisson", name="chebyshev")
        assert abs(rep.mean_squared_error - exact) <= 4 * rep.std_error


class TestCompetitiveRatio:
    def test_self_ratio(self, rng):
        inst = random_instance(rng, 4)
        den = monte_carlo_mse("switch", inst, 20, 500, 1)
        cr = competitive_ratio(den.mean_squared_error, inst.target, inst.behavior, 20,
                               mean_rewards=inst.mean_rewards, denominator=den)
        assert cr.ratio == 1.0 and float(cr) == 1.0

    def test_zero_estimator_grows_linearly_in_n(self):
        p = uniform_policy(3)
        pts = []
        for n in (100, 1000, 10_000):
            inst = BanditInstance(p, p, np.full(3, 0.5))
            zero = monte_carlo_mse("zero", inst, n, 200, 1).mean_squared_error
            cr = competitive_ratio(zero, p, p, n, trials=2000, base_seed=2)
            pts.append((n, cr.ratio))
        assert loglog_slope(pts).slope == pytest.approx(1.0, abs=0.1)

    def test_zero_denominator(self):
        p = uniform_policy(2)
        with pytest.raises(ZeroDenominator):
            competitive_ratio(0.1, p, p, 10, mean_rewards=[0, 0], trials=100)

    def test_negative_numerator(self):
        p = uniform_policy(2)
        with pytest.raises(ValueError):
            competitive_ratio(-0.1, p, p, 10, trials=100)


class TestLogLogSlope:
    def test_exact_inverse(self):
        fit = loglog_slope([(n, 7 / n) for n in (10, 100, 1000, 5000)])
        assert fit.slope == pytest.approx(-1) and fit.stderr == pytest.approx(0, abs=1e-12)

    def test_constant(self):
        assert loglog_slope([(n, 0.3) for n in (10, 20, 40)]).slope == pytest.approx(0, abs=1e-12)

    def test_noisy_power_law(self):
        rng = np.random.default_rng(3)
        ns = np.geomspace(10, 1e5, 20)
        pts = [(n, n**-0.5 * (1 + 0.01 * rng.standard_normal())) for n in ns]
        fit = loglog_slope(pts)
        assert abs(fit.slope + 0.5) <= 3 * fit.stderr

    def test_errors(self):
        with pytest.raises(ValueError):
            loglog_slope([(10, 1.0)])
        with pytest.raises(NonPositiveInput):
            loglog_slope([(10, 1.0), (20, 0.0)])


def test_squared_errors_trial_order(rng):
    inst = random_instance(rng, 3)
    ests = {"plugin": make_estimator("plugin", inst, 5)}
    full = squared_errors(ests, inst, 5, 50, 1)["plugin"]
    assert np.array_equal(full[:20], squared_errors(ests, inst, 5, 20, 1)["plugin"])
