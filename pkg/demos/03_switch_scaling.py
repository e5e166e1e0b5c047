"""
How the three estimators scale with sample size
================================================

A uniform target over k arms; the behavior policy gives sqrt(k) arms only
1/k^2 mass and spreads the rest evenly.  With n = 1.5 k, theory predicts
MSEs of order 1, n^{-1/2} and n^{-1} for plug-in, IS and Switch.  This
script runs a reduced version (fewer trials) and fits log-log slopes.
"""

from minimax_ope import plugin_mse_exact
from minimax_ope.experiments import (
    ExperimentConfig,
    experiment_switch_scaling,
    switch_scaling_instance,
)

config = ExperimentConfig(k_values=(100, 400, 1600), trials=2000, base_seed=1)
result = experiment_switch_scaling(config)

print(f"{'k':>6} {'n':>6} {'estimator':>9} {'mse':>10} {'stderr':>10}")
for row in result.rows:
    if row.trials is not None:
        print(f"{row.k:6d} {row.n:6d} {row.estimator:>9} {row.mse:10.3e} {row.std_error:10.1e}")

for name, fit in result.slopes.items():
    print(f"slope {name:7s} {fit.slope:+.3f} +/- {fit.stderr:.3f}")

# The plug-in MSE also has an exact closed form under multinomial sampling.
for k in config.k_values:
    print(f"k={k}: exact plug-in MSE {plugin_mse_exact(switch_scaling_instance(k), round(1.5 * k)):.4e}")
