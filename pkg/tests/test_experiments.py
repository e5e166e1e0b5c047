import math

import numpy as np
import pytest

from minimax_ope import NonSquareK
from minimax_ope.experiments import (
    ExperimentConfig,
    chebyshev_scaling_instance,
    competitive_ratio_instance,
    derive_seed,
    experiment_chebyshev_scaling,
    experiment_competitive_ratio,
    experiment_custom,
    experiment_switch_scaling,
    ratio_trend,
    switch_scaling_instance,
)
from minimax_ope.ratings import save_instance


def test_switch_scaling_construction():
    pb = switch_scaling_instance(100).behavior.weights
    assert np.all(pb[:10] == 1e-4)
    # the remainder keeps the total at one: 10 * 1e-4 + 90 * (1 - 1e-3) / 90
    assert np.allclose(pb[10:], (1 - 1e-3) / 90, rtol=0, atol=1e-18)


def test_non_square_k():
    with pytest.raises(NonSquareK):
        switch_scaling_instance(50)
    with pytest.raises(NonSquareK):
        experiment_switch_scaling(ExperimentConfig(k_values=(50,), trials=100))


@pytest.mark.parametrize("k", [100, 250, 630, 1000, 37])
def test_chebyshev_construction_sums_to_one(k):
    pb = chebyshev_scaling_instance(k).behavior.weights
    assert math.fsum(pb) == 1.0
    assert np.all(pb[1:] == k**-1.5)


def test_competitive_construction():
    inst = competitive_ratio_instance(100, 200, 7)
    assert np.allclose(inst.behavior.weights[:99], 1 / (200 * math.log(100)))
    assert np.count_nonzero(inst.target.weights) == 7


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(k_values=())
    with pytest.raises(ValueError):
        ExperimentConfig(k_values=(400, 100))
    with pytest.raises(ValueError):
        ExperimentConfig(trials=99)
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="bogus")
    with pytest.raises(ValueError):
        ExperimentConfig(base_seed=-1)


def test_switch_scaling_rows_and_slopes():
    res = experiment_switch_scaling(ExperimentConfig(k_values=(16, 64, 256), trials=200))
    mse_rows = [r for r in res.rows if r.trials is not None]
    assert len(mse_rows) == 9
    assert {r.estimator for r in mse_rows} == {"plugin", "is", "switch"}
    assert [r.n for r in mse_rows[::3]] == [24, 96, 384]
    assert set(res.slopes) == {"plugin", "is", "switch"}
    assert len(res.rows) == 12


def test_chebyshev_scaling_small():
    res = experiment_chebyshev_scaling(
        ExperimentConfig(experiment="chebyshev-scaling", k_values=(50, 120), trials=300))
    assert res.mse("chebyshev")[1] < res.mse("plugin")[1]
    assert [r.n for r in res.rows if r.estimator == "plugin"] == [round(50**1.5),
                                                                   round(120**1.5)]


def test_competitive_ratio_small():
    cfg = ExperimentConfig(experiment="competitive-ratio", k_values=(20,), trials=200,
                           s_stride=5, denominator_factor=2)
    res = experiment_competitive_ratio(cfg)
    ratios = [r for r in res.rows if r.estimator == "competitive_ratio"]
    assert [r.s for r in ratios] == [1, 6, 11, 16]
    assert all(math.isfinite(r.mse) and r.mse > 0 for r in ratios)
    dens = [r for r in res.rows if r.estimator == "switch"]
    assert all(r.trials == 400 for r in dens)
    trend = ratio_trend(res)
    assert trend["max_ratio_over_s"] >= max(r.mse / r.s for r in ratios) - 1e-15


def test_full_support_ratio_finite():
    cfg = ExperimentConfig(experiment="competitive-ratio", k_values=(10,), trials=100,
                           s_stride=9, denominator_factor=1)
    res = experiment_competitive_ratio(cfg)
    last = [r for r in res.rows if r.estimator == "competitive_ratio"][-1]
    assert last.s == 10 and math.isfinite(last.mse)


def test_custom_experiment(tmp_path):
    path = tmp_path / "inst.json"
    save_instance(switch_scaling_instance(16), path)
    cfg = ExperimentConfig(experiment="custom", instance_path=str(path), n_values=(20, 80),
                           trials=150, estimators=("plugin", "switch"))
    res = experiment_custom(cfg)
    assert set(res.slopes) == {"plugin", "switch"}


def test_reproducible_and_seed_sensitive():
    cfg = ExperimentConfig(k_values=(16,), trials=150, base_seed=3)
    a = experiment_switch_scaling(cfg).rows
    b = experiment_switch_scaling(cfg).rows
    c = experiment_switch_scaling(cfg.with_overrides(base_seed=4)).rows
    assert a == b and a != c


def test_derive_seed():
    assert derive_seed(1, 100) == derive_seed(1, 100)
    assert derive_seed(1, 100) != derive_seed(1, 400)
    assert 0 <= derive_seed(2**64 - 1, 5) < 2**64
