"""
How far is plug-in from the best possible estimator?
=====================================================

The competitive ratio divides an estimator's MSE by the minimax risk, here
stood in for by the Switch estimator's MSE.  With a behavior policy that
barely explores k-1 arms and a target spread uniformly over s of them, the
plug-in ratio grows roughly linearly in the support size s.
"""

from minimax_ope.experiments import ExperimentConfig, experiment_competitive_ratio, ratio_trend

config = ExperimentConfig(experiment="competitive-ratio", k_values=(100,), trials=1000,
                          s_stride=11, denominator_factor=3, base_seed=2)
result = experiment_competitive_ratio(config)

for row in result.rows:
    if row.estimator == "competitive_ratio":
        print(f"s={row.s:3d}  ratio={row.mse:6.3f}  (+/- {row.std_error:.3f})")

trend = ratio_trend(result)
print(f"Spearman(s, ratio) = {trend['spearman']:.3f},  max ratio/s = {trend['max_ratio_over_s']:.3f}")
